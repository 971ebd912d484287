//! Membership oracles for the relative, intrinsic relative and
//! quasi-relative interiors of a polyhedron, with normal cones and polars.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratlp::{rank, LpOutcome};
use crate::rat::{add, centroid, dot, frac, lerp, neg, serde_rat, sub, Matrix, Rat, Vector};
use crate::sets::{cone_generators, difference_cone, HPolyhedron, PolyCone};

/// Which interior notion an oracle decides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteriorKind {
    Ri,
    Iri,
    Qri,
}

impl InteriorKind {
    pub const ALL: [InteriorKind; 3] = [InteriorKind::Ri, InteriorKind::Iri, InteriorKind::Qri];

    pub fn name(self) -> &'static str {
        match self {
            InteriorKind::Ri => "ri",
            InteriorKind::Iri => "iri",
            InteriorKind::Qri => "qri",
        }
    }

    /// Membership with points outside `p` reported as `false` for every kind.
    pub fn member(self, p: &HPolyhedron, x: &[Rat]) -> Result<bool> {
        p.check_point(x)?;
        if p.is_empty() {
            return Err(Error::EmptySet);
        }
        if !p.contains(x) {
            return Ok(false);
        }
        match self {
            InteriorKind::Ri => ri_member(p, x),
            InteriorKind::Iri => iri_member(p, x),
            InteriorKind::Qri => qri_member(p, x),
        }
    }
}

impl std::str::FromStr for InteriorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ri" => Ok(InteriorKind::Ri),
            "iri" => Ok(InteriorKind::Iri),
            "qri" => Ok(InteriorKind::Qri),
            other => Err(Error::Parse(format!("unknown interior kind {other:?}"))),
        }
    }
}

fn member_of(p: &HPolyhedron, x: &[Rat]) -> Result<()> {
    p.check_point(x)?;
    if !p.contains(x) {
        return Err(Error::NotMember);
    }
    Ok(())
}

/// `x̄ ∈ ri(P)`: `x̄ ∈ P` and every inequality that is not an implicit
/// equality of `P` holds strictly at `x̄`.
pub fn ri_member(p: &HPolyhedron, x: &[Rat]) -> Result<bool> {
    p.check_point(x)?;
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    if !p.contains(x) {
        return Ok(false);
    }
    let (a, b) = p.ineq();
    Ok(p.implicit_rows().iter().enumerate().all(|(i, &imp)| imp || dot(&a[i], x) < b[i]))
}

/// `x̄ ∈ int(P)`: every constraint strict and no equalities at all.
pub fn int_member(p: &HPolyhedron, x: &[Rat]) -> Result<bool> {
    p.check_point(x)?;
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    if !is_full_dimensional(p) {
        return Ok(false);
    }
    ri_member(p, x)
}

/// Nonempty interior: no equality rows and no implicit equalities.
pub fn is_full_dimensional(p: &HPolyhedron) -> bool {
    !p.is_empty() && p.equality_system().0.iter().all(|r| r.iter().all(Zero::is_zero))
}

/// `x̄ ∈ iri(P)`: `cone(P − x̄)` is a linear subspace.
pub fn iri_member(p: &HPolyhedron, x: &[Rat]) -> Result<bool> {
    p.check_point(x)?;
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    if !p.contains(x) {
        return Ok(false);
    }
    Ok(difference_cone(p, x)?.is_subspace())
}

/// Largest `t ∈ [0, 1]` with `x + t·dir ∈ P`, for `x ∈ P` and `dir` parallel
/// to the affine hull.
fn step_along(p: &HPolyhedron, x: &[Rat], dir: &[Rat]) -> Rat {
    let (a, b) = p.ineq();
    let mut t = Rat::one();
    for (row, bound) in a.iter().zip(b) {
        let slope = dot(row, dir);
        if slope.is_positive() {
            let room = (bound - dot(row, x)) / slope;
            if room < t {
                t = room;
            }
        }
    }
    t
}

/// Every point of `P` can be pushed past `x̄`: for each vertex `v ≠ x̄` some
/// step `x̄ + t(x̄ − v)`, `t > 0`, stays in `P`, and likewise along `−r` for
/// each recession ray `r`.
pub fn relatively_absorbing(p: &HPolyhedron, x: &[Rat]) -> Result<bool> {
    member_of(p, x)?;
    let v = p.vrep();
    let vertex_ok = v.points().iter().filter(|q| q.as_slice() != x).all(|q| step_along(p, x, &sub(x, q)).is_positive());
    Ok(vertex_ok && v.rays().iter().all(|r| step_along(p, x, &neg(r)).is_positive()))
}

/// `N(x̄; P)` generated by the outward normals of the rows active at `x̄` and
/// both signs of every equality row.
pub fn normal_cone(p: &HPolyhedron, x: &[Rat]) -> Result<PolyCone> {
    member_of(p, x)?;
    let (a, _) = p.ineq();
    let (e, _) = p.eq();
    let mut generators: Matrix = p.active_rows(x).into_iter().map(|i| a[i].clone()).collect();
    for row in e {
        generators.push(row.clone());
        generators.push(neg(row));
    }
    generators.retain(|g| !g.iter().all(Zero::is_zero));
    Ok(PolyCone { dim: p.dim(), generators })
}

/// `C° = {y : ⟨y, g⟩ ≤ 0 for all generators g}` in generator form.
pub fn polar(c: &PolyCone) -> PolyCone {
    let g = cone_generators(c.dim, &c.generators, &[]);
    PolyCone { dim: c.dim, generators: g.all_rays() }
}

/// `P° = {y : ⟨y, x⟩ ≤ 1 for all x ∈ P}` in inequality form.
pub fn polar_set(p: &HPolyhedron) -> HPolyhedron {
    let n = p.dim();
    if p.is_empty() {
        return HPolyhedron::universe(n);
    }
    let v = p.vrep();
    let mut a = Vec::with_capacity(v.points().len() + v.rays().len());
    let mut b = Vec::with_capacity(a.capacity());
    for q in v.points() {
        a.push(q.clone());
        b.push(Rat::one());
    }
    for r in v.rays() {
        a.push(r.clone());
        b.push(Rat::zero());
    }
    HPolyhedron::raw(n, a, b, vec![], vec![])
}

/// `x̄ ∈ qri(P)`: the normal cone at `x̄` is a linear subspace.
pub fn qri_member(p: &HPolyhedron, x: &[Rat]) -> Result<bool> {
    member_of(p, x)?;
    Ok(normal_cone(p, x)?.is_subspace())
}

/// No functional supports `P` at `x̄` without being constant on `P`. Decided
/// independently of the subspace test: every normal-cone generator must have
/// its minimum over `P` attained at `x̄`.
pub fn nonsupport_point(p: &HPolyhedron, x: &[Rat]) -> Result<bool> {
    let n = normal_cone(p, x)?;
    Ok(n.generators.iter().all(|g| match p.maximize(&neg(g)) {
        LpOutcome::Optimal { value, .. } => -value == dot(g, x),
        _ => false,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiRegularity {
    pub quasi_regular: bool,
    pub route: String,
    /// Points at which the iri and qri oracles were compared.
    #[serde(with = "serde_rat::mat")]
    pub sweep: Matrix,
}

pub const FINITE_DIM_ROUTE: &str = "ri nonempty => ri = iri = qri in finite dimensions";

/// Vertices, edge midpoints, the centroid, and for unbounded sets each point
/// shifted by each ray together with the centroid shifted by all rays.
pub fn sweep_points(p: &HPolyhedron) -> Vec<Vector> {
    let v = p.vrep();
    let pts = v.points();
    let mut out: Vec<Vector> = pts.to_vec();
    let (e, _) = p.equality_system();
    let lineality = {
        let rays = v.rays();
        rays.iter().filter(|r| rays.contains(&neg(r))).count() / 2
    };
    let n = p.dim();
    let (a, _) = p.ineq();
    let active: Vec<Vec<usize>> = pts.iter().map(|q| p.active_rows(q)).collect();
    let needed = n.saturating_sub(lineality + 1 + rank(&e, n));
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let common: Vec<usize> = active[i].iter().copied().filter(|k| active[j].contains(k)).collect();
            if common.len() < needed {
                continue;
            }
            let mut tight: Matrix = common.iter().map(|&k| a[k].clone()).collect();
            tight.extend(e.iter().cloned());
            if n - rank(&tight, n) == lineality + 1 {
                out.push(lerp(&frac(1, 2), &pts[i], &pts[j]));
            }
        }
    }
    if let Some(c) = centroid(pts) {
        if !out.contains(&c) {
            out.push(c.clone());
        }
        let rays = v.rays();
        for q in pts {
            for r in rays {
                out.push(add(q, r));
            }
        }
        if !rays.is_empty() {
            out.push(rays.iter().fold(c, |acc, r| add(&acc, r)));
        }
    }
    out
}

/// Points compared by `is_quasi_regular`.
pub const QUASI_REGULAR_SWEEP: usize = 12;

/// At most `k` of `points`, evenly strided, keeping the first and last.
pub fn spread(points: Vec<Vector>, k: usize) -> Vec<Vector> {
    let n = points.len();
    if n <= k {
        return points;
    }
    if k < 2 {
        return points.into_iter().take(k).collect();
    }
    (0..k).map(|i| points[i * (n - 1) / (k - 1)].clone()).collect()
}

/// Always quasi-regular in finite dimensions; the oracles are swept over a
/// spread of the sweep points to confirm `iri = qri` pointwise.
pub fn is_quasi_regular(p: &HPolyhedron) -> Result<QuasiRegularity> {
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    let sweep = spread(sweep_points(p), QUASI_REGULAR_SWEEP);
    for x in &sweep {
        let iri = iri_member(p, x)?;
        let qri = qri_member(p, x)?;
        if iri != qri {
            return Err(Error::OracleDisagreement(format!(
                "iri = {iri}, qri = {qri} at ({})",
                crate::rat::format_vec(x)
            )));
        }
    }
    Ok(QuasiRegularity { quasi_regular: true, route: FINITE_DIM_ROUTE.to_string(), sweep })
}

pub fn default_segment_samples() -> Vec<Rat> {
    vec![frac(1, 4), frac(1, 2), frac(3, 4), Rat::one()]
}

/// Every point `t·x̄ + (1−t)·x̃` for sampled `t ∈ (0, 1]` passes the `kind`
/// oracle, given that `x̄` does and `x̃ ∈ P`.
pub fn segment_check(
    p: &HPolyhedron,
    kind: InteriorKind,
    inner: &[Rat],
    other: &[Rat],
    samples: &[Rat],
) -> Result<bool> {
    p.check_point(inner)?;
    p.check_point(other)?;
    if !kind.member(p, inner)? {
        return Err(Error::PreconditionFailed(format!("inner point is not in {}(P)", kind.name())));
    }
    if !p.contains(other) {
        return Err(Error::PreconditionFailed("outer point is not in P".into()));
    }
    if let Some(t) = samples.iter().find(|t| !t.is_positive() || **t > Rat::one()) {
        return Err(Error::PreconditionFailed(format!("sample {} outside (0, 1]", crate::rat::format(t))));
    }
    for t in samples {
        if !kind.member(p, &lerp(t, inner, other))? {
            return Ok(false);
        }
    }
    Ok(true)
}
