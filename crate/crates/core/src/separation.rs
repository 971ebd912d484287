//! Proper and strict separation with replayable certificates.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::interiors::{is_quasi_regular, normal_cone};
use crate::ratlp::{conic_combination, solve_unchecked, LpOutcome, LpProblem};
use crate::rat::{add, dot, frac, identity, mat_vec, neg, normalize_first, scale, serde_rat, zeros, Matrix, Rat, Vector};
use crate::sets::{contains_polyhedron, minkowski_difference, AffineFlat, HPolyhedron};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

/// Hypotheses of the two-set separation theorem, recomputed per call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub qri_a_nonempty: bool,
    pub qri_b_nonempty: bool,
    pub difference_quasi_regular: bool,
}

/// `sup⟨x*, A⟩ ≤ γ ≤ inf⟨x*, B⟩` with a witness off the threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    #[serde(with = "serde_rat::vec")]
    pub functional: Vector,
    #[serde(with = "serde_rat")]
    pub threshold: Rat,
    #[serde(with = "serde_rat")]
    pub side_a_bound: Rat,
    #[serde(with = "serde_rat")]
    pub side_b_bound: Rat,
    #[serde(with = "serde_rat::vec")]
    pub strict_witness: Vector,
    pub witness_side: Side,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypotheses: Option<HypothesisReport>,
}

impl SeparationCertificate {
    /// The same separation with functional and values multiplied by `k > 0`.
    pub fn scaled(&self, k: &Rat) -> Self {
        SeparationCertificate {
            functional: scale(k, &self.functional),
            threshold: k * &self.threshold,
            side_a_bound: k * &self.side_a_bound,
            side_b_bound: k * &self.side_b_bound,
            ..self.clone()
        }
    }

    /// Replays the certificate: one LP for `sup` over `a`, one for `inf` over
    /// `b`, then the witness check.
    pub fn verify(&self, a: &HPolyhedron, b: &HPolyhedron) -> Result<()> {
        check_dim(self.functional.len(), a.dim())?;
        check_dim(self.functional.len(), b.dim())?;
        check_dim(self.functional.len(), self.strict_witness.len())?;
        let fail = |msg: String| Err(Error::PreconditionFailed(msg));
        if self.functional.iter().all(Zero::is_zero) {
            return fail("functional is zero".into());
        }
        let sup_a = match a.maximize(&self.functional) {
            LpOutcome::Optimal { value, .. } => value,
            LpOutcome::Unbounded { .. } => return fail("functional unbounded above on A".into()),
            LpOutcome::Infeasible => return Err(Error::EmptySet),
        };
        let inf_b = match b.maximize(&neg(&self.functional)) {
            LpOutcome::Optimal { value, .. } => -value,
            LpOutcome::Unbounded { .. } => return fail("functional unbounded below on B".into()),
            LpOutcome::Infeasible => return Err(Error::EmptySet),
        };
        if sup_a != self.side_a_bound || inf_b != self.side_b_bound {
            return fail(format!(
                "recorded bounds ({}, {}) differ from LP values ({}, {})",
                crate::rat::format(&self.side_a_bound),
                crate::rat::format(&self.side_b_bound),
                crate::rat::format(&sup_a),
                crate::rat::format(&inf_b)
            ));
        }
        if sup_a > self.threshold || self.threshold > inf_b {
            return fail("threshold does not lie between the two bounds".into());
        }
        let w = &self.strict_witness;
        let value = dot(&self.functional, w);
        let ok = match self.witness_side {
            Side::A => a.contains(w) && value < self.threshold,
            Side::B => b.contains(w) && value > self.threshold,
        };
        if !ok {
            return fail("witness is not strictly off the threshold on its side".into());
        }
        Ok(())
    }
}

/// Sum of the normal-cone generators whose negation is not in the cone, or
/// `None` when the cone is a subspace.
fn irreversible_normal(generators: &[Vector], dim: usize) -> Option<Vector> {
    let mut sum = zeros(dim);
    let mut any = false;
    for g in generators {
        if conic_combination(generators, &neg(g)).is_none() {
            sum = add(&sum, g);
            any = true;
        }
    }
    any.then_some(sum)
}

/// First generator-derived point of `p` with `⟨c, ·⟩ < level`: the vertex
/// minimizing `⟨c, ·⟩` (lowest index on ties), else a vertex moved along a
/// ray that decreases `⟨c, ·⟩`.
fn point_below(p: &HPolyhedron, c: &[Rat], level: &Rat) -> Option<Vector> {
    let v = p.vrep();
    let best = v
        .points()
        .iter()
        .map(|q| (q, dot(c, q)))
        .reduce(|acc, cur| if cur.1 < acc.1 { cur } else { acc })?;
    if best.1 < *level {
        return Some(best.0.clone());
    }
    let ray = v.rays().iter().find(|r| dot(c, r).is_negative())?;
    Some(add(best.0, ray))
}

fn point_above(p: &HPolyhedron, c: &[Rat], level: &Rat) -> Option<Vector> {
    point_below(p, &neg(c), &-level.clone())
}

/// Strictly separating functional of `x̄ ∉ P` from `P`: maximize
/// `⟨y, x̄⟩ − γ` over `⟨y, v⟩ ≤ γ` on vertices, `⟨y, r⟩ ≤ 0` on rays and the
/// box `|y_i| ≤ 1`.
fn exterior_functional(p: &HPolyhedron, x: &[Rat]) -> Option<Vector> {
    let n = p.dim();
    let v = p.vrep();
    let mut a: Matrix = Vec::new();
    let mut b = Vec::new();
    for q in v.points() {
        let mut row = q.clone();
        row.push(-Rat::one());
        a.push(row);
        b.push(Rat::zero());
    }
    for r in v.rays() {
        let mut row = r.clone();
        row.push(Rat::zero());
        a.push(row);
        b.push(Rat::zero());
    }
    for i in 0..n {
        let mut row = zeros(n + 1);
        row[i] = Rat::one();
        a.push(row.clone());
        b.push(Rat::one());
        a.push(neg(&row));
        b.push(Rat::one());
    }
    let mut objective = x.to_vec();
    objective.push(-Rat::one());
    match solve_unchecked(&LpProblem::new(objective, a, b, vec![], vec![])) {
        LpOutcome::Optimal { value, point } if value.is_positive() => Some(point[..n].to_vec()),
        _ => None,
    }
}

fn bounds(a: &HPolyhedron, b: &HPolyhedron, c: &[Rat]) -> Option<(Rat, Rat)> {
    let sup_a = a.maximize(c).value().cloned()?;
    let inf_b = -b.maximize(&neg(c)).value().cloned()?;
    Some((sup_a, inf_b))
}

fn certificate_for(
    a: &HPolyhedron,
    b: &HPolyhedron,
    functional: Vector,
    threshold: impl FnOnce(&Rat, &Rat) -> Rat,
) -> Result<SeparationCertificate> {
    let (functional, _) = normalize_first(&functional);
    let (sup_a, inf_b) = bounds(a, b, &functional)
        .ok_or_else(|| Error::OracleDisagreement("separating functional is unbounded on a side".into()))?;
    let gamma = threshold(&sup_a, &inf_b);
    let (witness, side) = match point_below(a, &functional, &gamma) {
        Some(w) => (w, Side::A),
        None => match point_above(b, &functional, &gamma) {
            Some(w) => (w, Side::B),
            None => return Err(Error::OracleDisagreement("no strict witness on either side".into())),
        },
    };
    Ok(SeparationCertificate {
        functional,
        threshold: gamma,
        side_a_bound: sup_a,
        side_b_bound: inf_b,
        strict_witness: witness,
        witness_side: side,
        hypotheses: None,
    })
}

/// Proper separation of `x̄` from `P` (side A is `P`, side B is `{x̄}`).
/// `None` exactly when `x̄ ∈ qri(P)`.
pub fn properly_separate_point(p: &HPolyhedron, x: &[Rat]) -> Result<Option<SeparationCertificate>> {
    p.check_point(x)?;
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    let single = HPolyhedron::point(x);
    if !p.contains(x) {
        let y = exterior_functional(p, x)
            .ok_or_else(|| Error::OracleDisagreement("exterior point admits no strict separator".into()))?;
        return certificate_for(p, &single, y, |sup_a, _| sup_a.clone()).map(Some);
    }
    let n = normal_cone(p, x)?;
    match irreversible_normal(&n.generators, p.dim()) {
        None => Ok(None),
        Some(s) => certificate_for(p, &single, s, |_, inf_b| inf_b.clone()).map(Some),
    }
}

/// Proper separation of `P` (side A) from `Q` (side B) through the point `0`
/// and the difference `P − Q`. `None` exactly when `ri(P) ∩ ri(Q) ≠ ∅`.
pub fn properly_separate_sets(p: &HPolyhedron, q: &HPolyhedron) -> Result<Option<SeparationCertificate>> {
    check_dim(p.dim(), q.dim())?;
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptySet);
    }
    let diff = minkowski_difference(p, q)?;
    let origin = zeros(p.dim());
    let functional = if diff.contains(&origin) {
        match irreversible_normal(&normal_cone(&diff, &origin)?.generators, p.dim()) {
            None => return Ok(None),
            Some(s) => s,
        }
    } else {
        exterior_functional(&diff, &origin)
            .ok_or_else(|| Error::OracleDisagreement("disjoint sets admit no strict separator".into()))?
    };
    let mut cert = certificate_for(p, q, functional, |sup_a, inf_b| (sup_a + inf_b) * frac(1, 2))?;
    cert.hypotheses = Some(HypothesisReport {
        qri_a_nonempty: true,
        qri_b_nonempty: true,
        difference_quasi_regular: is_quasi_regular(&diff)?.quasi_regular,
    });
    Ok(Some(cert))
}

/// Independent decision of `ri(P) ∩ ri(Q) ≠ ∅`: implicit rows of both sets
/// as equalities, every other row with a common slack `t ≤ 1`; maximize `t`.
pub fn ri_intersect(p: &HPolyhedron, q: &HPolyhedron) -> Result<bool> {
    check_dim(p.dim(), q.dim())?;
    if p.is_empty() || q.is_empty() {
        return Ok(false);
    }
    let n = p.dim();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut e = Vec::new();
    let mut d = Vec::new();
    for s in [p, q] {
        let (sa, sb) = s.ineq();
        for (i, &imp) in s.implicit_rows().iter().enumerate() {
            let mut row = sa[i].clone();
            if imp {
                row.push(Rat::zero());
                e.push(row);
                d.push(sb[i].clone());
            } else {
                row.push(Rat::one());
                a.push(row);
                b.push(sb[i].clone());
            }
        }
        let (se, sd) = s.eq();
        for (row, rhs) in se.iter().zip(sd) {
            let mut row = row.clone();
            row.push(Rat::zero());
            e.push(row);
            d.push(rhs.clone());
        }
    }
    let mut cap = zeros(n + 1);
    cap[n] = Rat::one();
    a.push(cap.clone());
    b.push(Rat::one());
    Ok(match solve_unchecked(&LpProblem::new(cap, a, b, e, d)) {
        LpOutcome::Optimal { value, .. } => value.is_positive(),
        _ => false,
    })
}

/// Result of separating a point from a set inside a subspace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceSeparation {
    #[serde(with = "serde_rat::vec")]
    pub functional: Vector,
    #[serde(with = "serde_rat")]
    pub sup: Rat,
    #[serde(with = "serde_rat")]
    pub value: Rat,
    #[serde(with = "serde_rat")]
    pub margin: Rat,
}

/// `u ∈ L` with `sup⟨u, P⟩ < ⟨u, x̄⟩`, solved in the coordinates of `L` with
/// the box `|s_i| ≤ 1` and lifted back through the basis.
pub fn strict_separate_in_subspace(l: &AffineFlat, p: &HPolyhedron, x: &[Rat]) -> Result<SubspaceSeparation> {
    let n = l.ambient_dim();
    check_dim(n, p.dim())?;
    check_dim(n, x.len())?;
    if !l.base.iter().all(Zero::is_zero) && !l.contains(&zeros(n)) {
        return Err(Error::PreconditionFailed("flat does not pass through the origin".into()));
    }
    if p.is_empty() {
        return Err(Error::PreconditionFailed("set is empty".into()));
    }
    if !contains_polyhedron(&l.to_polyhedron(), p)? {
        return Err(Error::PreconditionFailed("set is not contained in the subspace".into()));
    }
    if !l.contains(x) {
        return Err(Error::PreconditionFailed("point is not in the subspace".into()));
    }
    if p.contains(x) {
        return Err(Error::PreconditionFailed("point lies in the closure of the set".into()));
    }
    let k = l.dim();
    let v = p.vrep();
    // coordinates (s, γ); u = Σ s_i basis_i
    let lift = |w: &[Rat]| mat_vec(&l.basis, w);
    let mut a: Matrix = Vec::new();
    let mut b = Vec::new();
    for q in v.points() {
        let mut row = lift(q);
        row.push(-Rat::one());
        a.push(row);
        b.push(Rat::zero());
    }
    for r in v.rays() {
        let mut row = lift(r);
        row.push(Rat::zero());
        a.push(row);
        b.push(Rat::zero());
    }
    for row in identity(k) {
        let mut up = row.clone();
        up.push(Rat::zero());
        a.push(up.clone());
        b.push(Rat::one());
        a.push(neg(&up));
        b.push(Rat::one());
    }
    let mut objective = lift(x);
    objective.push(-Rat::one());
    let s = match solve_unchecked(&LpProblem::new(objective, a, b, vec![], vec![])) {
        LpOutcome::Optimal { value, point } if value.is_positive() => point,
        _ => return Err(Error::OracleDisagreement("no strictly separating functional in the subspace".into())),
    };
    let functional = (0..n)
        .map(|j| (0..k).map(|i| &s[i] * &l.basis[i][j]).fold(Rat::zero(), |acc, t| acc + t))
        .collect::<Vector>();
    let sup = p
        .maximize(&functional)
        .value()
        .cloned()
        .ok_or_else(|| Error::OracleDisagreement("separator unbounded on the set".into()))?;
    let value = dot(&functional, x);
    let margin = &value - &sup;
    Ok(SubspaceSeparation { functional, sup, value, margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, vec_from};
    use crate::sets::VPolyhedron;

    fn square() -> HPolyhedron {
        HPolyhedron::boxed(&vec_from(&[0, 0]), &vec_from(&[1, 1]))
    }

    fn interval(lo: i64, hi: i64) -> HPolyhedron {
        HPolyhedron::boxed(&vec_from(&[lo]), &vec_from(&[hi]))
    }

    #[test]
    fn corner_certificate() {
        let x = vec_from(&[0, 0]);
        let c = properly_separate_point(&square(), &x).unwrap().unwrap();
        assert_eq!(c.functional, vec_from(&[-1, -1]));
        assert_eq!(c.strict_witness, vec_from(&[1, 1]));
        assert_eq!(c.witness_side, Side::A);
        c.verify(&square(), &HPolyhedron::point(&x)).unwrap();
    }

    #[test]
    fn center_is_not_separable() {
        assert!(properly_separate_point(&square(), &[frac(1, 2), frac(1, 2)]).unwrap().is_none());
    }

    #[test]
    fn half_line_certificate() {
        let p = HPolyhedron::from_inequalities(1, vec![vec_from(&[-1])], vec_from(&[0])).unwrap();
        let c = properly_separate_point(&p, &vec_from(&[0])).unwrap().unwrap();
        assert_eq!(c.functional, vec_from(&[-1]));
        assert_eq!(c.strict_witness, vec_from(&[1]));
    }

    #[test]
    fn exterior_point_certificate() {
        let x = vec_from(&[2, 2]);
        let c = properly_separate_point(&square(), &x).unwrap().unwrap();
        c.verify(&square(), &HPolyhedron::point(&x)).unwrap();
    }

    #[test]
    fn disjoint_boxes() {
        let q = HPolyhedron::boxed(&vec_from(&[2, 0]), &vec_from(&[3, 1]));
        let c = properly_separate_sets(&square(), &q).unwrap().unwrap();
        assert_eq!(c.functional, vec_from(&[1, 0]));
        assert_eq!(c.threshold, frac(3, 2));
        assert_eq!(c.side_a_bound, int(1));
        assert_eq!(c.side_b_bound, int(2));
        c.verify(&square(), &q).unwrap();
        assert!(!ri_intersect(&square(), &q).unwrap());
        assert!(c.hypotheses.unwrap().difference_quasi_regular);
    }

    #[test]
    fn same_square_is_not_separable() {
        assert!(properly_separate_sets(&square(), &square()).unwrap().is_none());
        assert!(ri_intersect(&square(), &square()).unwrap());
    }

    #[test]
    fn touching_intervals() {
        let (p, q) = (interval(0, 1), interval(1, 2));
        let c = properly_separate_sets(&p, &q).unwrap().unwrap();
        assert_eq!(c.functional, vec_from(&[1]));
        assert_eq!(c.threshold, int(1));
        assert!(c.strict_witness == vec_from(&[0]) || c.strict_witness == vec_from(&[2]));
        c.verify(&p, &q).unwrap();
        assert!(!ri_intersect(&p, &q).unwrap());
    }

    #[test]
    fn certificates_survive_positive_scaling() {
        let (p, q) = (interval(0, 1), interval(1, 2));
        let c = properly_separate_sets(&p, &q).unwrap().unwrap();
        for k in [int(2), frac(1, 3)] {
            c.scaled(&k).verify(&p, &q).unwrap();
        }
        assert!(c.scaled(&int(-1)).verify(&p, &q).is_err());
    }

    #[test]
    fn subspace_separation_on_axis() {
        let l = AffineFlat::subspace(2, vec![vec_from(&[1, 0])]);
        let p = VPolyhedron::new(2, vec![vec_from(&[-1, 0]), vec![frac(-1, 2), int(0)]], vec![]).unwrap().to_h();
        let s = strict_separate_in_subspace(&l, &p, &vec_from(&[0, 0])).unwrap();
        assert_eq!(s.functional, vec_from(&[1, 0]));
        assert_eq!(s.margin, frac(1, 2));
    }

    #[test]
    fn subspace_separation_in_plane() {
        let l = AffineFlat::subspace(2, identity(2));
        let s = strict_separate_in_subspace(&l, &square(), &vec_from(&[2, 2])).unwrap();
        assert!(s.margin.is_positive());
    }

    #[test]
    fn subspace_separation_preconditions() {
        let l = AffineFlat::subspace(2, identity(2));
        let err = strict_separate_in_subspace(&l, &square(), &[frac(1, 2), frac(1, 2)]).unwrap_err();
        assert!(matches!(err, Error::PreconditionFailed(m) if m.contains("closure")));
        let axis = AffineFlat::subspace(2, vec![vec_from(&[1, 0])]);
        let err = strict_separate_in_subspace(&axis, &square(), &vec_from(&[2, 0])).unwrap_err();
        assert!(matches!(err, Error::PreconditionFailed(m) if m.contains("contained")));
        let seg = VPolyhedron::new(2, vec![vec_from(&[1, 0]), vec_from(&[2, 0])], vec![]).unwrap().to_h();
        let err = strict_separate_in_subspace(&axis, &seg, &vec_from(&[0, 1])).unwrap_err();
        assert!(matches!(err, Error::PreconditionFailed(m) if m.contains("point is not")));
    }
}
