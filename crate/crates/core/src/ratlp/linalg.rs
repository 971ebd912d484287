use num_traits::{One, Zero};

use crate::rat::{zeros, Matrix, Rat, Vector};

/// Reduced row echelon form of a matrix with `cols` columns.
#[derive(Debug, Clone)]
pub struct Rref {
    pub rows: Matrix,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn rref(m: &[Vec<Rat>], cols: usize) -> Rref {
    let mut rows: Matrix = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    Rref { rows, pivots, cols }
}

pub fn rank(m: &[Vec<Rat>], cols: usize) -> usize {
    rref(m, cols).rank()
}

/// Exact basis of `{x : Mx = 0}` for a matrix with `cols` columns. One basis
/// vector per free column, with a one in that column.
pub fn nullspace(m: &[Vec<Rat>], cols: usize) -> Vec<Vector> {
    let r = rref(m, cols);
    let mut is_pivot = vec![false; cols];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = zeros(cols);
            v[f] = Rat::one();
            for (row, &p) in r.rows.iter().zip(&r.pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// A particular solution of `Mx = rhs` (free variables set to zero), or `None`
/// if the system is inconsistent.
pub fn solve_particular(m: &[Vec<Rat>], rhs: &[Rat], cols: usize) -> Option<Vector> {
    let augmented: Matrix = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut row = row.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let r = rref(&augmented, cols + 1);
    if r.pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = zeros(cols);
    for (row, &p) in r.rows.iter().zip(&r.pivots) {
        x[p] = row[cols].clone();
    }
    Some(x)
}

/// Solves `Σ coeffs[i]·basis[i] = v` for linearly independent `basis`.
pub fn coordinates(basis: &[Vector], v: &[Rat]) -> Option<Vector> {
    let n = v.len();
    let k = basis.len();
    // columns are basis vectors
    let m: Matrix = (0..n).map(|i| basis.iter().map(|b| b[i].clone()).collect()).collect();
    let x = solve_particular(&m, v, k)?;
    Some(x)
}
