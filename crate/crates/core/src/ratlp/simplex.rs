//! Dense two-phase primal simplex over exact rationals with Bland's rule.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rat::{dot, mat_vec, serde_rat, zeros, Matrix, Rat, Vector};

/// Largest number of variables accepted by [`solve_lp`].
pub const MAX_DIM: usize = 24;
/// Largest number of constraint rows accepted by [`solve_lp`].
pub const MAX_CONSTRAINTS: usize = 200;

/// `maximize c·x  subject to  Ax ≤ b, Ex = d`, with `x` free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpProblem {
    #[serde(with = "serde_rat::vec")]
    pub objective: Vector,
    #[serde(rename = "A", with = "serde_rat::mat")]
    pub a: Matrix,
    #[serde(with = "serde_rat::vec")]
    pub b: Vector,
    #[serde(rename = "E", with = "serde_rat::mat", default)]
    pub e: Matrix,
    #[serde(with = "serde_rat::vec", default)]
    pub d: Vector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vector },
    /// `point` is feasible; `ray` satisfies `A·ray ≤ 0`, `E·ray = 0`, `c·ray > 0`.
    Unbounded { point: Vector, ray: Vector },
    Infeasible,
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible)
    }

    pub fn value(&self) -> Option<&Rat> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&Vector> {
        match self {
            LpOutcome::Optimal { point, .. } | LpOutcome::Unbounded { point, .. } => Some(point),
            LpOutcome::Infeasible => None,
        }
    }
}

impl LpProblem {
    pub fn new(objective: Vector, a: Matrix, b: Vector, e: Matrix, d: Vector) -> Self {
        LpProblem { objective, a, b, e, d }
    }

    /// Feasibility problem (zero objective) in `n` variables.
    pub fn feasibility(n: usize, a: Matrix, b: Vector, e: Matrix, d: Vector) -> Self {
        LpProblem { objective: zeros(n), a, b, e, d }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        check_dim(self.a.len(), self.b.len())?;
        check_dim(self.e.len(), self.d.len())?;
        for row in self.a.iter().chain(&self.e) {
            check_dim(n, row.len())?;
        }
        Ok(())
    }

    /// True if `x` satisfies every constraint exactly.
    pub fn is_feasible_point(&self, x: &[Rat]) -> bool {
        mat_vec(&self.a, x).iter().zip(&self.b).all(|(ax, b)| ax <= b)
            && mat_vec(&self.e, x).iter().zip(&self.d).all(|(ex, d)| ex == d)
    }
}

/// Solves `p` exactly. Rejects instances above the desk-scale limits.
pub fn solve_lp(p: &LpProblem) -> Result<LpOutcome> {
    p.validate()?;
    if p.num_vars() > MAX_DIM {
        return Err(Error::DeskScaleLimit(format!(
            "{} variables (limit {MAX_DIM})",
            p.num_vars()
        )));
    }
    let rows = p.a.len() + p.e.len();
    if rows > MAX_CONSTRAINTS {
        return Err(Error::DeskScaleLimit(format!("{rows} constraints (limit {MAX_CONSTRAINTS})")));
    }
    Ok(solve_unchecked(p))
}

/// Same as [`solve_lp`] without the size limits; used for auxiliary problems
/// whose variable count is a generator count rather than an ambient dimension.
pub(crate) fn solve_unchecked(p: &LpProblem) -> LpOutcome {
    debug_assert!(p.validate().is_ok());
    let outcome = Tableau::build(p).run();
    debug_assert!(check_outcome(p, &outcome));
    outcome
}

fn check_outcome(p: &LpProblem, outcome: &LpOutcome) -> bool {
    match outcome {
        LpOutcome::Optimal { value, point } => {
            p.is_feasible_point(point) && &dot(&p.objective, point) == value
        }
        LpOutcome::Unbounded { point, ray } => {
            p.is_feasible_point(point)
                && mat_vec(&p.a, ray).iter().all(|v| !v.is_positive())
                && mat_vec(&p.e, ray).iter().all(Zero::is_zero)
                && dot(&p.objective, ray).is_positive()
        }
        LpOutcome::Infeasible => true,
    }
}

/// Column layout: `x⁺ (n) | x⁻ (n) | slacks (mA) | artificials`.
struct Tableau {
    n: usize,
    rows: Vec<Vector>,
    rhs: Vector,
    basis: Vec<usize>,
    /// Reduced costs `c_j − c_B·B⁻¹a_j` of the current phase (maximization).
    reduced: Vector,
    objective_value: Rat,
    ncols: usize,
    first_artificial: usize,
    allowed: Vec<bool>,
    cost: Vector,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn build(p: &LpProblem) -> Self {
        let n = p.num_vars();
        let ma = p.a.len();
        let me = p.e.len();
        let first_artificial = 2 * n + ma;

        let mut rows = Vec::with_capacity(ma + me);
        let mut rhs = Vec::with_capacity(ma + me);
        let mut needs_artificial = Vec::with_capacity(ma + me);
        for (i, (row, b)) in p.a.iter().zip(&p.b).enumerate() {
            let mut r = zeros(first_artificial);
            for j in 0..n {
                r[j] = row[j].clone();
                r[n + j] = -row[j].clone();
            }
            r[2 * n + i] = Rat::one();
            if b.is_negative() {
                for x in r.iter_mut() {
                    *x = -x.clone();
                }
                rhs.push(-b.clone());
                needs_artificial.push(true);
            } else {
                rhs.push(b.clone());
                needs_artificial.push(false);
            }
            rows.push(r);
        }
        for (row, d) in p.e.iter().zip(&p.d) {
            let mut r = zeros(first_artificial);
            let flip = d.is_negative();
            for j in 0..n {
                let v = if flip { -row[j].clone() } else { row[j].clone() };
                r[n + j] = -v.clone();
                r[j] = v;
            }
            rhs.push(if flip { -d.clone() } else { d.clone() });
            needs_artificial.push(true);
            rows.push(r);
        }

        let n_art = needs_artificial.iter().filter(|&&a| a).count();
        let ncols = first_artificial + n_art;
        let mut basis = Vec::with_capacity(rows.len());
        let mut k = first_artificial;
        for (i, r) in rows.iter_mut().enumerate() {
            r.resize(ncols, Rat::zero());
            if needs_artificial[i] {
                r[k] = Rat::one();
                basis.push(k);
                k += 1;
            } else {
                basis.push(2 * n + i);
            }
        }

        let mut cost = p.objective.clone();
        cost.extend(p.objective.iter().map(|c| -c.clone()));
        cost.resize(ncols, Rat::zero());

        Tableau {
            n,
            rows,
            rhs,
            basis,
            reduced: zeros(ncols),
            objective_value: Rat::zero(),
            ncols,
            first_artificial,
            allowed: vec![true; ncols],
            cost,
        }
    }

    fn set_phase_costs(&mut self, costs: &[Rat]) {
        // reduced_j = c_j − Σ_i c_{B_i} a_ij
        let mut reduced = costs.to_vec();
        let mut value = Rat::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (rj, aij) in reduced.iter_mut().zip(&self.rows[i]) {
                *rj -= cb * aij;
            }
            value += cb * &self.rhs[i];
        }
        self.reduced = reduced;
        self.objective_value = value;
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let inv = self.rows[r][e].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][e].is_zero() {
                continue;
            }
            let f = self.rows[i][e].clone();
            for (x, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        if !self.reduced[e].is_zero() {
            let f = self.reduced[e].clone();
            for (x, p) in self.reduced.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            self.objective_value += &f * &pivot_rhs;
        }
        self.basis[r] = e;
    }

    /// Bland's rule: lowest-index improving column, lowest-index leaving
    /// variable among ratio-test ties.
    fn iterate(&mut self) -> Step {
        loop {
            let entering = (0..self.ncols).find(|&j| self.allowed[j] && self.reduced[j].is_positive());
            let Some(e) = entering else {
                return Step::Optimal;
            };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Step::Unbounded(e),
                Some((r, _)) => self.pivot(r, e),
            }
        }
    }

    fn run(mut self) -> LpOutcome {
        if self.ncols > self.first_artificial {
            let mut phase1 = zeros(self.ncols);
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = -Rat::one();
            }
            self.set_phase_costs(&phase1);
            // phase 1 is bounded above by zero
            let _ = self.iterate();
            if self.objective_value.is_negative() {
                return LpOutcome::Infeasible;
            }
            self.drive_out_artificials();
        }
        for j in self.first_artificial..self.ncols {
            self.allowed[j] = false;
        }
        let cost = self.cost.clone();
        self.set_phase_costs(&cost);
        match self.iterate() {
            Step::Optimal => {
                let point = self.point();
                LpOutcome::Optimal { value: self.objective_value.clone(), point }
            }
            Step::Unbounded(e) => {
                let point = self.point();
                let mut dir = zeros(self.ncols);
                dir[e] = Rat::one();
                for (i, &b) in self.basis.iter().enumerate() {
                    dir[b] = -self.rows[i][e].clone();
                }
                let ray = (0..self.n).map(|j| &dir[j] - &dir[self.n + j]).collect();
                LpOutcome::Unbounded { point, ray }
            }
        }
    }

    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.first_artificial {
                let col = (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero());
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        // redundant equality row
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    fn point(&self) -> Vector {
        let mut z = zeros(self.ncols);
        for (i, &b) in self.basis.iter().enumerate() {
            z[b] = self.rhs[i].clone();
        }
        (0..self.n).map(|j| &z[j] - &z[self.n + j]).collect()
    }
}
