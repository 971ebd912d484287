//! Interior calculus: images under linear maps, products, differences and
//! translations, checked at sample points.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::interiors::{is_quasi_regular, sweep_points, InteriorKind};
use crate::par;
use crate::ratlp::{solve_unchecked, LpOutcome, LpProblem};
use crate::rat::{add, centroid, dot, frac, int, lerp, mat_vec, scale, serde_rat, sub, zeros, Matrix, Rat, Vector};
use crate::sets::{cartesian_product, linear_image, minkowski_difference, translate, HPolyhedron};

/// Seed of the random part of [`default_samples`].
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Vertices, edge midpoints and centroid of `p` (plus ray shifts when
/// unbounded), and five seeded random convex combinations of its points.
pub fn default_samples(p: &HPolyhedron, seed: u64) -> Matrix {
    if p.is_empty() {
        return vec![];
    }
    let mut out = sweep_points(p);
    let v = p.vrep();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..5 {
        let weights: Vec<i64> = v.points().iter().map(|_| rng.random_range(1..=9)).collect();
        let total: i64 = weights.iter().sum();
        let mut x = zeros(p.dim());
        for (w, q) in weights.iter().zip(v.points()) {
            x = add(&x, &scale(&frac(*w, total), q));
        }
        for r in v.rays() {
            x = add(&x, &scale(&int(rng.random_range(0..=3)), r));
        }
        out.push(x);
    }
    out
}

/// A point of `ri(P)`: the centroid of the points plus the sum of the rays,
/// a strictly positive combination of every generator.
pub fn relative_interior_point(p: &HPolyhedron) -> Result<Vector> {
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    let v = p.vrep();
    let c = centroid(v.points()).expect("nonempty");
    Ok(v.rays().iter().fold(c, |acc, r| add(&acc, r)))
}

/// Largest `s` with `base + s·dir ∈ P`; `None` when unbounded.
fn max_step(p: &HPolyhedron, base: &[Rat], dir: &[Rat]) -> Option<Rat> {
    let (a, b) = p.ineq();
    a.iter()
        .zip(b)
        .filter_map(|(row, bound)| {
            let slope = dot(row, dir);
            slope.is_positive().then(|| (bound - dot(row, base)) / slope)
        })
        .min()
}

/// A preimage `x` of `y` built along the segment from a fixed anchor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preimage {
    #[serde(with = "serde_rat::vec")]
    pub y: Vector,
    #[serde(with = "serde_rat::vec")]
    pub x: Vector,
    /// `x = t·x̃ + (1−t)·x̄` with `x̄` the anchor.
    #[serde(with = "serde_rat")]
    pub t: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageCheck {
    pub holds: bool,
    pub forward_checked: usize,
    #[serde(with = "serde_rat::opt_vec", default, skip_serializing_if = "Option::is_none")]
    pub forward_violation: Option<Vector>,
    pub preimages: Vec<Preimage>,
    #[serde(with = "serde_rat::opt_vec", default, skip_serializing_if = "Option::is_none")]
    pub backward_violation: Option<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_quasi_regular: Option<bool>,
}

/// `M(int P) = int(M P)` for `int` = iri or qri: forward at the samples of
/// `x`-space, backward at the default samples of the image together with the
/// images of the samples, each backward point getting an explicit preimage.
fn check_image(kind: InteriorKind, m: &Matrix, p: &HPolyhedron, samples: &[Vector]) -> Result<ImageCheck> {
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    for row in m {
        check_dim(p.dim(), row.len())?;
    }
    for s in samples {
        check_dim(p.dim(), s.len())?;
    }
    let image = linear_image(m, p)?;
    let forward = par::try_map(samples, |x| -> Result<Option<bool>> {
        if !kind.member(p, x)? {
            return Ok(None);
        }
        Ok(Some(kind.member(&image, &mat_vec(m, x))?))
    })?;
    let forward_checked = forward.iter().flatten().count();
    let forward_violation =
        samples.iter().zip(&forward).find(|(_, o)| **o == Some(false)).map(|(s, _)| s.clone());

    let anchor = relative_interior_point(p)?;
    if !InteriorKind::Iri.member(p, &anchor)? {
        return Err(Error::OracleDisagreement("anchor is not an intrinsic relative interior point".into()));
    }
    let anchor_image = mat_vec(m, &anchor);
    let mut targets = default_samples(&image, DEFAULT_SEED);
    targets.extend(samples.iter().map(|x| mat_vec(m, x)));
    targets.dedup();
    let backward = par::try_map(&targets, |y| -> Result<Option<(Preimage, bool)>> {
        if !kind.member(&image, y)? {
            return Ok(None);
        }
        let pre = preimage(m, p, &anchor, &anchor_image, &image, y)?;
        let ok = mat_vec(m, &pre.x) == *y && kind.member(p, &pre.x)?;
        Ok(Some((pre, ok)))
    })?;
    let mut preimages = Vec::new();
    let mut backward_violation = None;
    for (pre, ok) in backward.into_iter().flatten() {
        if !ok && backward_violation.is_none() {
            backward_violation = Some(pre.y.clone());
        }
        preimages.push(pre);
    }
    let image_quasi_regular = match kind {
        InteriorKind::Qri => Some(is_quasi_regular(&image)?.quasi_regular),
        _ => None,
    };
    Ok(ImageCheck {
        holds: forward_violation.is_none() && backward_violation.is_none(),
        forward_checked,
        forward_violation,
        preimages,
        backward_violation,
        image_quasi_regular,
    })
}

/// `y ∈ (u, ȳ)` with `u = ȳ + s(y − ȳ) ∈ M P`, `s = min(s_max, 2)`; then
/// `x = t·x̃ + (1−t)·x̄` with `M x̃ = u`, `x̃ ∈ P`, `t = 1/s`.
fn preimage(m: &Matrix, p: &HPolyhedron, anchor: &[Rat], anchor_image: &[Rat], image: &HPolyhedron, y: &[Rat]) -> Result<Preimage> {
    if y == anchor_image {
        return Ok(Preimage { y: y.to_vec(), x: anchor.to_vec(), t: Rat::zero() });
    }
    let dir = sub(y, anchor_image);
    let two = int(2);
    let s = max_step(image, anchor_image, &dir).map_or(two.clone(), |s_max| s_max.min(two));
    if s <= Rat::one() {
        return Err(Error::OracleDisagreement(format!(
            "{} cannot be extended past itself inside the image",
            crate::rat::format_vec(y)
        )));
    }
    let u = add(anchor_image, &scale(&s, &dir));
    let x_far = lift(m, p, &u)?;
    let t = Rat::one() / &s;
    Ok(Preimage { y: y.to_vec(), x: lerp(&t, &x_far, anchor), t })
}

/// Some `x ∈ P` with `Mx = u`.
fn lift(m: &Matrix, p: &HPolyhedron, u: &[Rat]) -> Result<Vector> {
    let (a, b) = p.ineq();
    let (e, d) = p.eq();
    let mut eq = e.clone();
    eq.extend(m.iter().cloned());
    let mut rhs = d.clone();
    rhs.extend(u.iter().cloned());
    match solve_unchecked(&LpProblem::feasibility(p.dim(), a.clone(), b.clone(), eq, rhs)) {
        LpOutcome::Optimal { point, .. } => Ok(point),
        _ => Err(Error::OracleDisagreement(format!("{} has no preimage in P", crate::rat::format_vec(u)))),
    }
}

/// `M(iri P) = iri(M P)`.
pub fn check_image_iri(m: &Matrix, p: &HPolyhedron, samples: &[Vector]) -> Result<ImageCheck> {
    check_image(InteriorKind::Iri, m, p, samples)
}

/// `M(qri P) = qri(M P)`; the image's quasi-regularity is reported.
pub fn check_image_qri(m: &Matrix, p: &HPolyhedron, samples: &[Vector]) -> Result<ImageCheck> {
    check_image(InteriorKind::Qri, m, p, samples)
}

/// Two sides of a sampled biconditional.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleAgreement {
    #[serde(with = "serde_rat::vec")]
    pub point: Vector,
    pub lhs: bool,
    pub rhs: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agreement {
    pub holds: bool,
    pub samples: Vec<SampleAgreement>,
}

impl Agreement {
    fn from_samples(samples: Vec<SampleAgreement>) -> Self {
        Agreement { holds: samples.iter().all(|s| s.lhs == s.rhs), samples }
    }
}

/// `(x, y) ∈ qri(P × Q) ⇔ x ∈ qri P ∧ y ∈ qri Q`. Without samples, the
/// pairs of default samples of `P` and `Q` are used.
pub fn qri_of_product(p: &HPolyhedron, q: &HPolyhedron, samples: &[Vector]) -> Result<Agreement> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = p.dim();
    let product = cartesian_product(p, q);
    let owned;
    let samples = if samples.is_empty() {
        let (sp, sq) = (default_samples(p, DEFAULT_SEED), default_samples(q, DEFAULT_SEED));
        owned = sp.iter().flat_map(|x| sq.iter().map(move |y| [x.clone(), y.clone()].concat())).collect::<Matrix>();
        &owned[..]
    } else {
        samples
    };
    let rows = par::try_map(samples, |s| -> Result<SampleAgreement> {
        check_dim(product.dim(), s.len())?;
        let (x, y) = s.split_at(n);
        let lhs = InteriorKind::Qri.member(&product, s)?;
        let rhs = InteriorKind::Qri.member(p, x)? && InteriorKind::Qri.member(q, y)?;
        Ok(SampleAgreement { point: s.clone(), lhs, rhs })
    })?;
    Ok(Agreement::from_samples(rows))
}

/// `x = p − q` with `p ∈ qri P`, `q ∈ qri Q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    #[serde(with = "serde_rat::vec")]
    pub x: Vector,
    #[serde(with = "serde_rat::vec")]
    pub p: Vector,
    #[serde(with = "serde_rat::vec")]
    pub q: Vector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceCheck {
    pub holds: bool,
    /// Per sample: `x ∈ qri(P − Q)` against "a decomposition exists".
    pub samples: Vec<SampleAgreement>,
    pub decompositions: Vec<Decomposition>,
    /// Pairs `p ∈ qri P`, `q ∈ qri Q` from the default samples whose
    /// difference was tested for membership in `qri(P − Q)`.
    pub pairs_checked: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_violation: Option<Decomposition>,
}

/// Rows of `P` in the variables `(p, q, t)`: implicit rows as equalities,
/// the others with the shared slack `t`.
fn slack_rows(p: &HPolyhedron, offset: usize, width: usize, a: &mut Matrix, b: &mut Vector, e: &mut Matrix, d: &mut Vector) {
    let n = p.dim();
    let place = |row: &Vector| {
        let mut r = zeros(width);
        r[offset..offset + n].clone_from_slice(row);
        r
    };
    let (pa, pb) = p.ineq();
    for (i, row) in pa.iter().enumerate() {
        let mut r = place(row);
        if p.implicit_rows()[i] {
            e.push(r);
            d.push(pb[i].clone());
        } else {
            r[width - 1] = Rat::one();
            a.push(r);
            b.push(pb[i].clone());
        }
    }
    let (pe, pd) = p.eq();
    e.extend(pe.iter().map(place));
    d.extend(pd.iter().cloned());
}

/// Maximizes the least slack of `p ∈ P`, `q ∈ Q` with `p − q = x`; a
/// positive optimum puts both in the relative interiors.
fn decompose(p: &HPolyhedron, q: &HPolyhedron, x: &[Rat]) -> Option<Decomposition> {
    let n = p.dim();
    let width = 2 * n + 1;
    let (mut a, mut b, mut e, mut d) = (vec![], vec![], vec![], vec![]);
    slack_rows(p, 0, width, &mut a, &mut b, &mut e, &mut d);
    slack_rows(q, n, width, &mut a, &mut b, &mut e, &mut d);
    let mut cap = zeros(width);
    cap[width - 1] = Rat::one();
    a.push(cap.clone());
    b.push(Rat::one());
    for i in 0..n {
        let mut r = zeros(width);
        r[i] = Rat::one();
        r[n + i] = -Rat::one();
        e.push(r);
        d.push(x[i].clone());
    }
    match solve_unchecked(&LpProblem::new(cap, a, b, e, d)) {
        LpOutcome::Optimal { value, point } if value.is_positive() => {
            Some(Decomposition { x: x.to_vec(), p: point[..n].to_vec(), q: point[n..2 * n].to_vec() })
        }
        _ => None,
    }
}

/// `qri(P − Q) = qri P − qri Q`: each sample `x` is tested for membership on
/// the left and for a decomposition on the right, and every default-sample
/// pair of qri points is pushed through the difference.
pub fn qri_of_difference(p: &HPolyhedron, q: &HPolyhedron, samples: &[Vector]) -> Result<DifferenceCheck> {
    check_dim(p.dim(), q.dim())?;
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptySet);
    }
    let diff = minkowski_difference(p, q)?;
    let owned;
    let samples = if samples.is_empty() {
        owned = default_samples(&diff, DEFAULT_SEED);
        &owned[..]
    } else {
        samples
    };
    let rows = par::try_map(samples, |x| -> Result<(SampleAgreement, Option<Decomposition>)> {
        check_dim(p.dim(), x.len())?;
        let lhs = InteriorKind::Qri.member(&diff, x)?;
        let dec = decompose(p, q, x);
        if let Some(dc) = &dec {
            let verified = InteriorKind::Qri.member(p, &dc.p)?
                && InteriorKind::Qri.member(q, &dc.q)?
                && sub(&dc.p, &dc.q) == *x;
            if !verified {
                return Err(Error::OracleDisagreement(format!(
                    "decomposition of {} does not re-verify",
                    crate::rat::format_vec(x)
                )));
            }
        }
        Ok((SampleAgreement { point: x.clone(), lhs, rhs: dec.is_some() }, dec))
    })?;
    let (agreements, decs): (Vec<_>, Vec<_>) = rows.into_iter().unzip();

    let qri_points = |s: &HPolyhedron| -> Result<Matrix> {
        let mut out = Vec::new();
        for x in default_samples(s, DEFAULT_SEED) {
            if InteriorKind::Qri.member(s, &x)? {
                out.push(x);
            }
        }
        Ok(out)
    };
    let (qp, qq) = (qri_points(p)?, qri_points(q)?);
    let pairs: Vec<(Vector, Vector)> =
        qp.iter().flat_map(|x| qq.iter().map(move |y| (x.clone(), y.clone()))).collect();
    let pair_results = par::try_map(&pairs, |(x, y)| -> Result<Option<Decomposition>> {
        let z = sub(x, y);
        Ok((!InteriorKind::Qri.member(&diff, &z)?).then(|| Decomposition { x: z, p: x.clone(), q: y.clone() }))
    })?;
    let pair_violation = pair_results.into_iter().flatten().next();
    let agreement = Agreement::from_samples(agreements);
    Ok(DifferenceCheck {
        holds: agreement.holds && pair_violation.is_none(),
        samples: agreement.samples,
        decompositions: decs.into_iter().flatten().collect(),
        pairs_checked: pairs.len(),
        pair_violation,
    })
}

/// `x ∈ int P ⇔ x + q ∈ int(q + P)` for every interior kind.
pub fn translation_equivariance(p: &HPolyhedron, shift: &[Rat], samples: &[Vector]) -> Result<Agreement> {
    let moved = translate(p, shift)?;
    let rows = par::try_map(samples, |x| -> Result<Vec<SampleAgreement>> {
        let y = add(x, shift);
        InteriorKind::ALL
            .iter()
            .map(|k| Ok(SampleAgreement { point: x.clone(), lhs: k.member(p, x)?, rhs: k.member(&moved, &y)? }))
            .collect()
    })?;
    Ok(Agreement::from_samples(rows.into_iter().flatten().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{identity, vec_from};

    fn square() -> HPolyhedron {
        HPolyhedron::boxed(&vec_from(&[0, 0]), &vec_from(&[1, 1]))
    }

    fn interval(lo: i64, hi: i64) -> HPolyhedron {
        HPolyhedron::boxed(&[int(lo)], &[int(hi)])
    }

    #[test]
    fn projection_preimage() {
        let proj = vec![vec_from(&[1, 0])];
        let r = check_image_iri(&proj, &square(), &default_samples(&square(), 1)).unwrap();
        assert!(r.holds && r.forward_checked > 0);
        let half = r.preimages.iter().find(|pre| pre.y == vec![frac(1, 2)]).unwrap();
        assert_eq!(half.x, vec![frac(1, 2), frac(1, 2)]);
        for pre in &r.preimages {
            assert_eq!(mat_vec(&proj, &pre.x), pre.y);
        }
    }

    #[test]
    fn identity_and_zero_maps() {
        let r = check_image_iri(&identity(2), &square(), &default_samples(&square(), 2)).unwrap();
        assert!(r.holds);
        let zero = vec![vec_from(&[0, 0])];
        let r = check_image_iri(&zero, &square(), &default_samples(&square(), 2)).unwrap();
        assert!(r.holds);
        assert_eq!(r.preimages.len(), 1);
        assert_eq!(r.preimages[0].x, vec![frac(1, 2), frac(1, 2)]);
    }

    #[test]
    fn qri_images() {
        let shear = vec![vec_from(&[1, 1]), vec_from(&[0, 1])];
        let r = check_image_qri(&shear, &square(), &[vec![frac(1, 2), frac(1, 2)]]).unwrap();
        assert!(r.holds && r.forward_checked == 1 && r.image_quasi_regular == Some(true));
        let seg = HPolyhedron::boxed(&vec_from(&[0, 0]), &vec_from(&[1, 0]));
        let rank_one = vec![vec_from(&[2, 0])];
        let r = check_image_qri(&rank_one, &seg, &[vec_from(&[0, 0]), vec_from(&[1, 0])]).unwrap();
        assert!(r.holds);
        assert_eq!(r.forward_checked, 0);
        assert!(r.preimages.iter().all(|pre| pre.y != vec_from(&[0]) && pre.y != vec_from(&[2])));
    }

    #[test]
    fn products() {
        let c = vec![frac(1, 2), frac(1, 2)];
        let r = qri_of_product(&square(), &square(), &[[c.clone(), c.clone()].concat(), [vec_from(&[0, 0]), c].concat()])
            .unwrap();
        assert!(r.holds);
        assert!(r.samples[0].lhs && r.samples[0].rhs);
        assert!(!r.samples[1].lhs && !r.samples[1].rhs);
        let seg = interval(0, 1);
        let pt = HPolyhedron::point(&[int(5)]);
        let r = qri_of_product(&seg, &pt, &[]).unwrap();
        assert!(r.holds);
        assert!(r.samples.iter().any(|s| s.lhs));
        for s in &r.samples {
            assert_eq!(s.lhs, s.point[0] > int(0) && s.point[0] < int(1));
        }
    }

    #[test]
    fn differences() {
        let r = qri_of_difference(&interval(0, 1), &interval(0, 1), &[vec_from(&[0])]).unwrap();
        assert!(r.holds);
        let d = &r.decompositions[0];
        assert!(d.p[0] > int(0) && d.p[0] < int(1) && d.q[0] > int(0) && d.q[0] < int(1));
        assert_eq!(sub(&d.p, &d.q), vec_from(&[0]));
        let r = qri_of_difference(&interval(0, 1), &interval(1, 2), &[vec_from(&[-1]), vec_from(&[0])]).unwrap();
        assert!(r.holds);
        assert!(r.samples[0].lhs && r.samples[0].rhs);
        assert!(!r.samples[1].lhs && !r.samples[1].rhs);
        let r = qri_of_difference(&square(), &HPolyhedron::point(&vec_from(&[1, 1])), &[]).unwrap();
        assert!(r.holds && r.pairs_checked > 0);
    }

    #[test]
    fn translations() {
        let samples = default_samples(&square(), 3);
        let r = translation_equivariance(&square(), &[frac(-7, 3), int(4)], &samples).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn samples_are_deterministic_members() {
        let s = default_samples(&square(), 9);
        assert_eq!(s, default_samples(&square(), 9));
        assert!(s.iter().all(|x| square().contains(x)));
        let unbounded = HPolyhedron::from_inequalities(2, vec![vec_from(&[-1, 0]), vec_from(&[0, -1])], vec_from(&[0, 0])).unwrap();
        assert!(default_samples(&unbounded, 9).iter().all(|x| unbounded.contains(x)));
    }
}
