use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dd::cone_generators;
use super::vpoly::VPolyhedron;
use crate::error::{check_dim, Error, Result};
use crate::ratlp::{solve_unchecked, LpOutcome, LpProblem, MAX_CONSTRAINTS, MAX_DIM};
use crate::rat::{dot, mat_vec, serde_rat, unit, zeros, Matrix, Rat, Vector};

/// `{x ∈ Rⁿ : Ax ≤ b, Ex = d}`.
///
/// Emptiness, the implicit-equality partition and the generator form are
/// computed on first use and cached; clones share nothing but the values
/// already computed.
#[derive(Debug, Clone)]
pub struct HPolyhedron {
    dim: usize,
    a: Matrix,
    b: Vector,
    e: Matrix,
    d: Vector,
    empty: OnceLock<bool>,
    implicit: OnceLock<Vec<bool>>,
    vrep: OnceLock<VPolyhedron>,
}

impl PartialEq for HPolyhedron {
    /// Syntactic equality of the constraint systems. Use [`super::set_equal`]
    /// for set equality.
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.a == other.a
            && self.b == other.b
            && self.e == other.e
            && self.d == other.d
    }
}

impl HPolyhedron {
    /// Validated constructor; enforces the desk-scale limits.
    pub fn new(dim: usize, a: Matrix, b: Vector, e: Matrix, d: Vector) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::DeskScaleLimit(format!("ambient dimension {dim} (limit {MAX_DIM})")));
        }
        let rows = a.len() + e.len();
        if rows > MAX_CONSTRAINTS {
            return Err(Error::DeskScaleLimit(format!("{rows} constraints (limit {MAX_CONSTRAINTS})")));
        }
        check_dim(a.len(), b.len())?;
        check_dim(e.len(), d.len())?;
        for row in a.iter().chain(&e) {
            check_dim(dim, row.len())?;
        }
        Ok(Self::raw(dim, a, b, e, d))
    }

    /// Unvalidated constructor for systems produced inside the crate.
    pub(crate) fn raw(dim: usize, a: Matrix, b: Vector, e: Matrix, d: Vector) -> Self {
        debug_assert!(a.iter().chain(&e).all(|r| r.len() == dim));
        debug_assert_eq!(a.len(), b.len());
        debug_assert_eq!(e.len(), d.len());
        HPolyhedron {
            dim,
            a,
            b,
            e,
            d,
            empty: OnceLock::new(),
            implicit: OnceLock::new(),
            vrep: OnceLock::new(),
        }
    }

    pub fn from_inequalities(dim: usize, a: Matrix, b: Vector) -> Result<Self> {
        Self::new(dim, a, b, vec![], vec![])
    }

    /// All of `Rⁿ`.
    pub fn universe(dim: usize) -> Self {
        Self::raw(dim, vec![], vec![], vec![], vec![])
    }

    /// The empty set in `Rⁿ`, written as `0·x ≤ −1`.
    pub fn empty(dim: usize) -> Self {
        Self::raw(dim, vec![zeros(dim)], vec![-Rat::one()], vec![], vec![])
    }

    pub fn point(p: &[Rat]) -> Self {
        let n = p.len();
        Self::raw(n, vec![], vec![], (0..n).map(|i| unit(n, i)).collect(), p.to_vec())
    }

    /// Axis-aligned box `lo ≤ x ≤ hi`.
    pub fn boxed(lo: &[Rat], hi: &[Rat]) -> Self {
        let n = lo.len();
        let mut a = Vec::with_capacity(2 * n);
        let mut b = Vec::with_capacity(2 * n);
        for i in 0..n {
            a.push(unit(n, i));
            b.push(hi[i].clone());
            a.push(unit(n, i).iter().map(|x| -x).collect());
            b.push(-lo[i].clone());
        }
        Self::raw(n, a, b, vec![], vec![])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ineq(&self) -> (&Matrix, &Vector) {
        (&self.a, &self.b)
    }

    pub fn eq(&self) -> (&Matrix, &Vector) {
        (&self.e, &self.d)
    }

    pub fn num_ineq(&self) -> usize {
        self.a.len()
    }

    pub fn num_eq(&self) -> usize {
        self.e.len()
    }

    pub(crate) fn check_point(&self, x: &[Rat]) -> Result<()> {
        check_dim(self.dim, x.len())
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        x.len() == self.dim
            && mat_vec(&self.a, x).iter().zip(&self.b).all(|(ax, b)| ax <= b)
            && mat_vec(&self.e, x).iter().zip(&self.d).all(|(ex, d)| ex == d)
    }

    /// Indices of inequality rows tight at `x`.
    pub fn active_rows(&self, x: &[Rat]) -> Vec<usize> {
        (0..self.a.len()).filter(|&i| dot(&self.a[i], x) == self.b[i]).collect()
    }

    /// LP over this polyhedron with the given objective (maximized).
    pub fn maximize(&self, objective: &[Rat]) -> LpOutcome {
        let p = LpProblem::new(
            objective.to_vec(),
            self.a.clone(),
            self.b.clone(),
            self.e.clone(),
            self.d.clone(),
        );
        solve_unchecked(&p)
    }

    pub fn is_empty(&self) -> bool {
        *self.empty.get_or_init(|| self.maximize(&zeros(self.dim)).is_infeasible())
    }

    /// Some point of the set, if nonempty.
    pub fn any_point(&self) -> Option<Vector> {
        self.maximize(&zeros(self.dim)).point().cloned()
    }

    /// For every inequality row: is it tight on the whole set? Decided by one
    /// LP per row maximizing its slack. Empty sets report no implicit rows.
    pub fn implicit_rows(&self) -> &[bool] {
        self.implicit.get_or_init(|| {
            if self.is_empty() {
                return vec![false; self.a.len()];
            }
            (0..self.a.len())
                .map(|i| {
                    let obj: Vector = self.a[i].iter().map(|x| -x).collect();
                    match self.maximize(&obj) {
                        LpOutcome::Optimal { value, .. } => value == -self.b[i].clone(),
                        _ => false,
                    }
                })
                .collect()
        })
    }

    /// `Ex = d` together with every implicit-equality row.
    pub fn equality_system(&self) -> (Matrix, Vector) {
        let mut e = self.e.clone();
        let mut d = self.d.clone();
        for (i, &imp) in self.implicit_rows().iter().enumerate() {
            if imp {
                e.push(self.a[i].clone());
                d.push(self.b[i].clone());
            }
        }
        (e, d)
    }

    /// Generator form, computed once by double description.
    pub fn vrep(&self) -> &VPolyhedron {
        self.vrep.get_or_init(|| self.compute_vrep())
    }

    /// Seeds the caches of a set built from generators: the vertex
    /// description, and the implicit rows as those tight on every vertex and
    /// flat along every ray.
    pub(crate) fn set_vrep(&self, v: VPolyhedron) {
        let implicit = (0..self.a.len())
            .map(|i| {
                v.points().iter().all(|p| dot(&self.a[i], p) == self.b[i])
                    && v.rays().iter().all(|r| dot(&self.a[i], r).is_zero())
            })
            .collect();
        let _ = self.empty.set(v.is_empty());
        let _ = self.implicit.set(implicit);
        let _ = self.vrep.set(v);
    }

    fn compute_vrep(&self) -> VPolyhedron {
        let n = self.dim;
        // homogenize: (x, t) with t ≥ 0, Ax − bt ≤ 0, Ex − dt = 0
        let mut ineq = Vec::with_capacity(self.a.len() + 1);
        let mut t_row = zeros(n + 1);
        t_row[n] = -Rat::one();
        ineq.push(t_row);
        for (row, b) in self.a.iter().zip(&self.b) {
            let mut h = row.clone();
            h.push(-b.clone());
            ineq.push(h);
        }
        let eq: Vec<Vector> = self
            .e
            .iter()
            .zip(&self.d)
            .map(|(row, d)| {
                let mut g = row.clone();
                g.push(-d.clone());
                g
            })
            .collect();
        let gens = cone_generators(n + 1, &ineq, &eq);
        let mut points = Vec::new();
        let mut rays = Vec::new();
        for g in &gens.rays {
            let t = &g[n];
            if t.is_positive() {
                points.push(g[..n].iter().map(|x| x / t).collect());
            } else {
                rays.push(g[..n].to_vec());
            }
        }
        for l in &gens.lineality {
            debug_assert!(l[n].is_zero());
            rays.push(l[..n].to_vec());
            rays.push(l[..n].iter().map(|x| -x).collect());
        }
        if points.is_empty() {
            return VPolyhedron::empty(n);
        }
        VPolyhedron::raw(n, points, rays)
    }

    pub fn to_json(&self) -> HPolyhedronJson {
        HPolyhedronJson {
            dim: self.dim,
            ineq: Some(IneqJson { a: self.a.clone(), b: self.b.clone() }),
            eq: Some(EqJson { e: self.e.clone(), d: self.d.clone() }),
        }
    }
}

/// Wire form: `{"dim": n, "ineq": {"A": .., "b": ..}, "eq": {"E": .., "d": ..}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HPolyhedronJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ineq: Option<IneqJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq: Option<EqJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IneqJson {
    #[serde(rename = "A", with = "serde_rat::mat")]
    pub a: Matrix,
    #[serde(with = "serde_rat::vec")]
    pub b: Vector,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqJson {
    #[serde(rename = "E", with = "serde_rat::mat")]
    pub e: Matrix,
    #[serde(with = "serde_rat::vec")]
    pub d: Vector,
}

impl TryFrom<HPolyhedronJson> for HPolyhedron {
    type Error = Error;

    fn try_from(j: HPolyhedronJson) -> Result<Self> {
        let (a, b) = j.ineq.map(|i| (i.a, i.b)).unwrap_or_default();
        let (e, d) = j.eq.map(|q| (q.e, q.d)).unwrap_or_default();
        HPolyhedron::new(j.dim, a, b, e, d)
    }
}

impl Serialize for HPolyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for HPolyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = HPolyhedronJson::deserialize(d)?;
        HPolyhedron::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::vec_from;

    fn unit_square() -> HPolyhedron {
        HPolyhedron::boxed(&vec_from(&[0, 0]), &vec_from(&[1, 1]))
    }

    #[test]
    fn emptiness() {
        assert!(!unit_square().is_empty());
        assert!(HPolyhedron::empty(2).is_empty());
        let p = HPolyhedron::from_inequalities(1, vec![vec_from(&[1]), vec_from(&[-1])], vec_from(&[0, -1]))
            .unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn implicit_rows_detected() {
        // 0 ≤ x ≤ 1, y ≤ 0, −y ≤ 0
        let p = HPolyhedron::from_inequalities(
            2,
            vec![vec_from(&[1, 0]), vec_from(&[-1, 0]), vec_from(&[0, 1]), vec_from(&[0, -1])],
            vec_from(&[1, 0, 0, 0]),
        )
        .unwrap();
        assert_eq!(p.implicit_rows(), &[false, false, true, true]);
    }

    #[test]
    fn json_round_trip() {
        let p = unit_square();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"A\""));
        let q: HPolyhedron = serde_json::from_str(&text).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rejects_floats_and_bad_shapes() {
        let bad = r#"{"dim": 1, "ineq": {"A": [["1"]], "b": [0.5]}}"#;
        assert!(serde_json::from_str::<HPolyhedron>(bad).is_err());
        let bad = r#"{"dim": 2, "ineq": {"A": [["1"]], "b": ["1"]}}"#;
        assert!(serde_json::from_str::<HPolyhedron>(bad).is_err());
    }

    #[test]
    fn desk_scale_dimension() {
        assert!(matches!(
            HPolyhedron::new(MAX_DIM + 1, vec![], vec![], vec![], vec![]),
            Err(Error::DeskScaleLimit(_))
        ));
    }
}
