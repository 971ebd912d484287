//! Polyhedral sets in H- and V-form and the set algebra built on them.

pub mod dd;
mod hpoly;
mod vpoly;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use dd::{cone_generators, ConeGenerators};
pub use hpoly::{EqJson, HPolyhedron, HPolyhedronJson, IneqJson};
pub use vpoly::{VPolyhedron, VPolyhedronJson};

use crate::error::{check_dim, Error, Result};
use crate::ratlp::{cone_contains, cone_is_subspace, nullspace, solve_particular, LpOutcome, MAX_DIM};
use crate::rat::{add, identity, mat_vec, neg, serde_rat, sub, zeros, Matrix, Rat, Vector};

fn check_scale(dim: usize) -> Result<()> {
    if dim > MAX_DIM {
        return Err(Error::DeskScaleLimit(format!("ambient dimension {dim} (limit {MAX_DIM})")));
    }
    Ok(())
}

/// Generator form of `p`.
pub fn h_to_v(p: &HPolyhedron) -> Result<VPolyhedron> {
    check_scale(p.dim())?;
    Ok(p.vrep().clone())
}

/// Inequality form of `v`.
pub fn v_to_h(v: &VPolyhedron) -> Result<HPolyhedron> {
    check_scale(v.dim())?;
    Ok(v.to_h())
}

/// `p ⊆ q`, decided by maximizing every row of `q` over `p`.
pub fn contains_polyhedron(q: &HPolyhedron, p: &HPolyhedron) -> Result<bool> {
    check_dim(q.dim(), p.dim())?;
    if p.is_empty() {
        return Ok(true);
    }
    let bounded_by = |row: &[Rat], bound: &Rat| match p.maximize(row) {
        LpOutcome::Optimal { value, .. } => value <= *bound,
        _ => false,
    };
    let (a, b) = q.ineq();
    if !a.iter().zip(b).all(|(r, b)| bounded_by(r, b)) {
        return Ok(false);
    }
    let (e, d) = q.eq();
    Ok(e.iter().zip(d).all(|(r, d)| bounded_by(r, d) && bounded_by(&neg(r), &-d.clone())))
}

/// Set equality by mutual inclusion.
pub fn set_equal(p: &HPolyhedron, q: &HPolyhedron) -> Result<bool> {
    Ok(contains_polyhedron(p, q)? && contains_polyhedron(q, p)?)
}

/// `base + span(basis)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineFlat {
    #[serde(with = "serde_rat::vec")]
    pub base: Vector,
    #[serde(with = "serde_rat::mat")]
    pub basis: Matrix,
}

impl AffineFlat {
    /// Linear subspace spanned by `basis`.
    pub fn subspace(dim: usize, basis: Matrix) -> Self {
        AffineFlat { base: zeros(dim), basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Constraint form `Mx = Mbase` where the rows of `M` span the orthogonal
    /// complement of the basis.
    pub fn equations(&self) -> (Matrix, Vector) {
        let n = self.ambient_dim();
        let normals = nullspace(&self.basis, n);
        let rhs = mat_vec(&normals, &self.base);
        (normals, rhs)
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        let (m, rhs) = self.equations();
        x.len() == self.ambient_dim() && mat_vec(&m, x) == rhs
    }

    pub fn to_polyhedron(&self) -> HPolyhedron {
        let (e, d) = self.equations();
        HPolyhedron::raw(self.ambient_dim(), vec![], vec![], e, d)
    }
}

/// Smallest affine flat containing `p`, from its full equality system.
pub fn affine_hull(p: &HPolyhedron) -> Result<AffineFlat> {
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = p.dim();
    let (e, d) = p.equality_system();
    if e.is_empty() {
        return Ok(AffineFlat { base: zeros(n), basis: identity(n) });
    }
    let base = solve_particular(&e, &d, n).ok_or_else(|| {
        Error::OracleDisagreement("equality system of a nonempty set is inconsistent".into())
    })?;
    Ok(AffineFlat { base, basis: nullspace(&e, n) })
}

/// `cone(generators) ∪ {0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyCone {
    pub dim: usize,
    #[serde(with = "serde_rat::mat")]
    pub generators: Matrix,
}

impl PolyCone {
    pub fn new(dim: usize, generators: Matrix) -> Result<Self> {
        for g in &generators {
            check_dim(dim, g.len())?;
        }
        Ok(PolyCone { dim, generators })
    }

    pub fn zero(dim: usize) -> Self {
        PolyCone { dim, generators: vec![] }
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        v.len() == self.dim && cone_contains(&self.generators, v)
    }

    pub fn is_subspace(&self) -> bool {
        cone_is_subspace(&self.generators)
    }

    /// `self ⊆ other`: every generator lies in `other`.
    pub fn is_subset_of(&self, other: &PolyCone) -> bool {
        self.dim == other.dim && self.generators.iter().all(|g| other.contains(g))
    }

    pub fn set_equal(&self, other: &PolyCone) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    /// `{x : ⟨g, x⟩ ≤ 0}` for every generator `g` of the polar; the inequality
    /// form of this cone.
    pub fn to_h(&self) -> HPolyhedron {
        let polar = cone_generators(self.dim, &self.generators, &[]);
        let n = self.dim;
        let a = polar.rays.clone();
        let b = zeros(a.len());
        let d = zeros(polar.lineality.len());
        HPolyhedron::raw(n, a, b, polar.lineality, d)
    }
}

/// Generators of `cone(P − x̄)`: vertex differences plus recession rays.
pub fn difference_cone(p: &HPolyhedron, x: &[Rat]) -> Result<PolyCone> {
    p.check_point(x)?;
    if !p.contains(x) {
        return Err(Error::NotMember);
    }
    let v = p.vrep();
    Ok(difference_cone_of(v, x))
}

pub(crate) fn difference_cone_of(v: &VPolyhedron, x: &[Rat]) -> PolyCone {
    let mut generators: Matrix = Vec::with_capacity(v.points().len() + v.rays().len());
    for p in v.points() {
        let g = sub(p, x);
        if !g.iter().all(Zero::is_zero) && !generators.contains(&g) {
            generators.push(g);
        }
    }
    for r in v.rays() {
        if !generators.contains(r) {
            generators.push(r.clone());
        }
    }
    PolyCone { dim: v.dim(), generators }
}

fn dedup(v: Vec<Vector>) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(v.len());
    for x in v {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// `{p − q : p ∈ P, q ∈ Q}` through the generator forms.
pub fn minkowski_difference(p: &HPolyhedron, q: &HPolyhedron) -> Result<HPolyhedron> {
    check_dim(p.dim(), q.dim())?;
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptySet);
    }
    let vp = p.vrep();
    let vq = q.vrep();
    let points = vp.points().iter().flat_map(|a| vq.points().iter().map(move |b| sub(a, b))).collect();
    let rays = vp.rays().iter().cloned().chain(vq.rays().iter().map(|r| neg(r))).collect();
    Ok(VPolyhedron::raw(p.dim(), dedup(points), dedup(rays)).to_h())
}

/// `{Mx : x ∈ P}`.
pub fn linear_image(m: &Matrix, p: &HPolyhedron) -> Result<HPolyhedron> {
    for row in m {
        check_dim(p.dim(), row.len())?;
    }
    let out_dim = m.len();
    check_scale(out_dim)?;
    if p.is_empty() {
        return Ok(HPolyhedron::empty(out_dim));
    }
    let v = p.vrep();
    let points = v.points().iter().map(|x| mat_vec(m, x)).collect();
    let rays = v.rays().iter().map(|r| mat_vec(m, r)).filter(|r: &Vector| !r.iter().all(Zero::is_zero));
    Ok(VPolyhedron::raw(out_dim, dedup(points), dedup(rays.collect())).to_h())
}

/// `q + P`.
pub fn translate(p: &HPolyhedron, q: &[Rat]) -> Result<HPolyhedron> {
    p.check_point(q)?;
    let (a, b) = p.ineq();
    let (e, d) = p.eq();
    let b = add(b, &mat_vec(a, q));
    let d = add(d, &mat_vec(e, q));
    Ok(HPolyhedron::raw(p.dim(), a.clone(), b, e.clone(), d))
}

/// `P × Q` by block-diagonal stacking.
pub fn cartesian_product(p: &HPolyhedron, q: &HPolyhedron) -> HPolyhedron {
    let (n, m) = (p.dim(), q.dim());
    let pad_left = |row: &Vector| {
        let mut r = row.clone();
        r.extend(zeros(m));
        r
    };
    let pad_right = |row: &Vector| {
        let mut r = zeros(n);
        r.extend(row.iter().cloned());
        r
    };
    let (pa, pb) = p.ineq();
    let (qa, qb) = q.ineq();
    let (pe, pd) = p.eq();
    let (qe, qd) = q.eq();
    let a = pa.iter().map(pad_left).chain(qa.iter().map(pad_right)).collect();
    let b = pb.iter().chain(qb).cloned().collect();
    let e = pe.iter().map(pad_left).chain(qe.iter().map(pad_right)).collect();
    let d = pd.iter().chain(qd).cloned().collect();
    HPolyhedron::raw(n + m, a, b, e, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{frac, int, vec_from};

    fn unit_square() -> HPolyhedron {
        HPolyhedron::boxed(&vec_from(&[0, 0]), &vec_from(&[1, 1]))
    }

    fn interval(lo: i64, hi: i64) -> HPolyhedron {
        HPolyhedron::boxed(&vec_from(&[lo]), &vec_from(&[hi]))
    }

    fn sorted(mut v: Vec<Vector>) -> Vec<Vector> {
        v.sort();
        v
    }

    #[test]
    fn h_to_v_examples() {
        let v = h_to_v(&interval(0, 1)).unwrap();
        assert_eq!(sorted(v.points().to_vec()), vec![vec_from(&[0]), vec_from(&[1])]);
        assert!(v.rays().is_empty());
        let v = h_to_v(&unit_square()).unwrap();
        assert_eq!(v.points().len(), 4);
        assert!(v.rays().is_empty());
    }

    #[test]
    fn v_to_h_quadrant() {
        let v = VPolyhedron::new(2, vec![vec_from(&[0, 0])], vec![vec_from(&[1, 0]), vec_from(&[0, 1])]).unwrap();
        let h = v_to_h(&v).unwrap();
        let (a, b) = h.ineq();
        assert_eq!(sorted(a.clone()), sorted(vec![vec_from(&[-1, 0]), vec_from(&[0, -1])]));
        assert!(b.iter().all(Zero::is_zero));
        assert_eq!(h.num_eq(), 0);
    }

    #[test]
    fn round_trip_with_lineality() {
        // strip 0 ≤ y ≤ 1
        let p = HPolyhedron::from_inequalities(2, vec![vec_from(&[0, 1]), vec_from(&[0, -1])], vec_from(&[1, 0]))
            .unwrap();
        let back = v_to_h(&h_to_v(&p).unwrap()).unwrap();
        assert!(set_equal(&p, &back).unwrap());
    }

    #[test]
    fn empty_round_trip() {
        let e = HPolyhedron::empty(2);
        let v = h_to_v(&e).unwrap();
        assert!(v.is_empty());
        assert!(v_to_h(&v).unwrap().is_empty());
    }

    #[test]
    fn affine_hull_examples() {
        let seg = VPolyhedron::new(2, vec![vec_from(&[0, 0]), vec_from(&[1, 0])], vec![]).unwrap().to_h();
        let f = affine_hull(&seg).unwrap();
        assert_eq!(f.base, vec_from(&[0, 0]));
        assert_eq!(f.basis.len(), 1);
        assert!(f.contains(&vec_from(&[5, 0])));
        assert!(!f.contains(&vec_from(&[0, 1])));

        assert_eq!(affine_hull(&unit_square()).unwrap().dim(), 2);

        let pt = HPolyhedron::point(&vec_from(&[2, 3]));
        let f = affine_hull(&pt).unwrap();
        assert_eq!(f.base, vec_from(&[2, 3]));
        assert!(f.basis.is_empty());

        assert_eq!(affine_hull(&HPolyhedron::empty(1)), Err(Error::EmptySet));
    }

    #[test]
    fn difference_cone_examples() {
        let c = difference_cone(&unit_square(), &vec_from(&[0, 0])).unwrap();
        let quadrant = PolyCone::new(2, vec![vec_from(&[1, 0]), vec_from(&[0, 1])]).unwrap();
        assert!(c.set_equal(&quadrant));
        let c = difference_cone(&unit_square(), &[frac(1, 2), frac(1, 2)]).unwrap();
        assert!(c.is_subspace());
        let c = difference_cone(&interval(0, 1), &vec_from(&[1])).unwrap();
        assert!(c.set_equal(&PolyCone::new(1, vec![vec_from(&[-1])]).unwrap()));
        assert_eq!(difference_cone(&interval(0, 1), &vec_from(&[2])), Err(Error::NotMember));
    }

    #[test]
    fn minkowski_examples() {
        let d = minkowski_difference(&interval(0, 1), &interval(0, 1)).unwrap();
        assert!(set_equal(&d, &interval(-1, 1)).unwrap());

        let d = minkowski_difference(&unit_square(), &HPolyhedron::point(&vec_from(&[1, 1]))).unwrap();
        let want = HPolyhedron::boxed(&vec_from(&[-1, -1]), &vec_from(&[0, 0]));
        assert!(set_equal(&d, &want).unwrap());

        let ray = VPolyhedron::new(2, vec![vec_from(&[0, 0])], vec![vec_from(&[1, 0])]).unwrap().to_h();
        let d = minkowski_difference(&unit_square(), &ray).unwrap();
        let want = HPolyhedron::from_inequalities(
            2,
            vec![vec_from(&[1, 0]), vec_from(&[0, 1]), vec_from(&[0, -1])],
            vec_from(&[1, 1, 0]),
        )
        .unwrap();
        assert!(set_equal(&d, &want).unwrap());

        assert_eq!(minkowski_difference(&unit_square(), &HPolyhedron::empty(2)), Err(Error::EmptySet));
    }

    #[test]
    fn linear_image_examples() {
        let proj = vec![vec_from(&[1, 0])];
        assert!(set_equal(&linear_image(&proj, &unit_square()).unwrap(), &interval(0, 1)).unwrap());
        let zero = vec![vec_from(&[0, 0])];
        let img = linear_image(&zero, &unit_square()).unwrap();
        assert!(set_equal(&img, &HPolyhedron::point(&[int(0)])).unwrap());
        let diff = vec![vec_from(&[1, -1])];
        assert!(set_equal(&linear_image(&diff, &unit_square()).unwrap(), &interval(-1, 1)).unwrap());
        assert!(linear_image(&vec![vec_from(&[1])], &unit_square()).is_err());
    }

    #[test]
    fn translate_examples() {
        assert!(set_equal(&translate(&interval(0, 1), &vec_from(&[2])).unwrap(), &interval(2, 3)).unwrap());
        let sq = unit_square();
        assert!(set_equal(&translate(&sq, &vec_from(&[0, 0])).unwrap(), &sq).unwrap());
        let want = HPolyhedron::boxed(&vec_from(&[-1, -1]), &vec_from(&[0, 0]));
        assert!(set_equal(&translate(&sq, &vec_from(&[-1, -1])).unwrap(), &want).unwrap());
    }

    #[test]
    fn product_examples() {
        let sq = cartesian_product(&interval(0, 1), &interval(0, 1));
        assert!(set_equal(&sq, &unit_square()).unwrap());
        let pp = cartesian_product(&HPolyhedron::point(&vec_from(&[1])), &HPolyhedron::point(&vec_from(&[2])));
        assert!(set_equal(&pp, &HPolyhedron::point(&vec_from(&[1, 2]))).unwrap());
        let strip = cartesian_product(&interval(0, 1), &HPolyhedron::universe(1));
        assert!(strip.contains(&vec_from(&[1, -100])));
        assert!(!strip.contains(&vec_from(&[2, 0])));
    }

}
