//! Double description: generators of a polyhedral cone `{y : Hy ≤ 0, Gy = 0}`.
//!
//! Rows are inserted one at a time. While the lineality space still crosses
//! the new hyperplane a lineality vector is turned into a ray; afterwards the
//! classic positive/negative ray combination runs with the combinatorial
//! adjacency test on zero sets.

use num_traits::{Signed, Zero};

use crate::ratlp::nullspace;
use crate::rat::{dot, identity, primitive, Rat, Vector};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConeGenerators {
    /// Basis of the lineality space.
    pub lineality: Vec<Vector>,
    /// Extreme rays modulo lineality, primitive integer vectors.
    pub rays: Vec<Vector>,
}

impl ConeGenerators {
    /// Rays plus both orientations of every lineality vector.
    pub fn all_rays(&self) -> Vec<Vector> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.iter().map(|x| -x).collect());
        }
        out
    }
}

#[derive(Clone)]
struct Ray {
    v: Vector,
    zeros: ZeroSet,
}

#[derive(Clone, PartialEq, Eq)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn with_capacity(bits: usize) -> Self {
        ZeroSet(vec![0; bits.div_ceil(64).max(1)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn intersect(&self, other: &Self) -> Self {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn is_superset_of(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Generators of `{y ∈ Rⁿ : h·y ≤ 0 ∀h ∈ ineq, g·y = 0 ∀g ∈ eq}`.
pub fn cone_generators(n: usize, ineq: &[Vector], eq: &[Vector]) -> ConeGenerators {
    let mut lineality: Vec<Vector> = if eq.is_empty() {
        identity(n)
    } else {
        nullspace(eq, n).into_iter().map(|v| primitive(&v)).collect()
    };
    let space_dim = lineality.len();
    let mut rays: Vec<Ray> = Vec::new();
    let bits = ineq.len();

    for (k, h) in ineq.iter().enumerate() {
        if let Some(pos) = lineality.iter().position(|l| !dot(h, l).is_zero()) {
            let l0 = lineality.remove(pos);
            let hl0 = dot(h, &l0);
            for l in lineality.iter_mut() {
                let hl = dot(h, l);
                if !hl.is_zero() {
                    let f = &hl / &hl0;
                    *l = primitive(&l.iter().zip(&l0).map(|(a, b)| a - &f * b).collect::<Vec<_>>());
                }
            }
            for r in rays.iter_mut() {
                let hr = dot(h, &r.v);
                if !hr.is_zero() {
                    let f = &hr / &hl0;
                    r.v = primitive(&r.v.iter().zip(&l0).map(|(a, b)| a - &f * b).collect::<Vec<_>>());
                }
                r.zeros.insert(k);
            }
            let oriented: Vector = if hl0.is_positive() { l0.iter().map(|x| -x).collect() } else { l0 };
            let mut zeros = ZeroSet::with_capacity(bits);
            for j in 0..k {
                zeros.insert(j);
            }
            rays.push(Ray { v: primitive(&oriented), zeros });
            continue;
        }

        let values: Vec<Rat> = rays.iter().map(|r| dot(h, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        if pos.is_empty() {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.zeros.insert(k);
                }
            }
            continue;
        }

        let pointed_dim = space_dim - lineality.len();
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for (i, r) in rays.iter().enumerate() {
            if values[i].is_zero() {
                let mut r = r.clone();
                r.zeros.insert(k);
                next.push(r);
            } else if values[i].is_negative() {
                next.push(r.clone());
            }
        }
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.intersect(&rays[q].zeros);
                if pointed_dim >= 2 && common.len() + 2 < pointed_dim {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .all(|r| r == p || r == q || !rays[r].zeros.is_superset_of(&common));
                if !adjacent {
                    continue;
                }
                let hp = &values[p];
                let hq = &values[q];
                let v: Vector = rays[q].v.iter().zip(&rays[p].v).map(|(a, b)| hp * a - hq * b).collect();
                let mut zeros = common;
                zeros.insert(k);
                next.push(Ray { v: primitive(&v), zeros });
            }
        }
        rays = next;
    }

    ConeGenerators { lineality, rays: rays.into_iter().map(|r| r.v).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::vec_from;

    fn sorted(mut v: Vec<Vector>) -> Vec<Vector> {
        v.sort();
        v
    }

    #[test]
    fn orthant() {
        let ineq = vec![vec_from(&[-1, 0]), vec_from(&[0, -1])];
        let g = cone_generators(2, &ineq, &[]);
        assert!(g.lineality.is_empty());
        assert_eq!(sorted(g.rays), sorted(vec![vec_from(&[1, 0]), vec_from(&[0, 1])]));
    }

    #[test]
    fn half_plane_keeps_lineality() {
        let g = cone_generators(2, &[vec_from(&[0, -1])], &[]);
        assert_eq!(g.lineality.len(), 1);
        assert_eq!(g.rays, vec![vec_from(&[0, 1])]);
    }

    #[test]
    fn square_cone_has_four_rays() {
        // homogenized unit square: -t <= 0, x - t <= 0, y - t <= 0, -x <= 0, -y <= 0
        let ineq = vec![
            vec_from(&[0, 0, -1]),
            vec_from(&[1, 0, -1]),
            vec_from(&[0, 1, -1]),
            vec_from(&[-1, 0, 0]),
            vec_from(&[0, -1, 0]),
        ];
        let g = cone_generators(3, &ineq, &[]);
        assert!(g.lineality.is_empty());
        assert_eq!(
            sorted(g.rays),
            sorted(vec![
                vec_from(&[0, 0, 1]),
                vec_from(&[1, 0, 1]),
                vec_from(&[0, 1, 1]),
                vec_from(&[1, 1, 1]),
            ])
        );
    }

    #[test]
    fn equalities_restrict_to_subspace() {
        let g = cone_generators(2, &[vec_from(&[-1, 0])], &[vec_from(&[1, -1])]);
        assert!(g.lineality.is_empty());
        assert_eq!(g.rays, vec![vec_from(&[1, 1])]);
    }

    #[test]
    fn pointed_at_zero() {
        // x <= 0 and -x <= 0 collapse the line
        let g = cone_generators(1, &[vec_from(&[1]), vec_from(&[-1])], &[]);
        assert!(g.lineality.is_empty());
        assert!(g.rays.is_empty());
    }
}
