//! Set-valued maps with polyhedral graphs, and epigraphs of vector functions
//! with respect to an ordering cone.

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, Error, Result};
use crate::functions::AffinePiece;
use crate::interiors::{int_member, is_full_dimensional, is_quasi_regular, InteriorKind};
use crate::par;
use crate::rat::{frac, int, lerp, serde_rat, sub, zeros, Matrix, Rat, Vector};
use crate::sets::{linear_image, HPolyhedron, PolyCone};

/// `F: Rˣ ⇉ Rʸ` given by its graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapJson")]
pub struct PolySetValuedMap {
    x_dim: usize,
    y_dim: usize,
    graph: HPolyhedron,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapJson {
    x_dim: usize,
    y_dim: usize,
    graph: HPolyhedron,
}

impl TryFrom<MapJson> for PolySetValuedMap {
    type Error = Error;

    fn try_from(j: MapJson) -> Result<Self> {
        PolySetValuedMap::new(j.x_dim, j.y_dim, j.graph)
    }
}

impl PolySetValuedMap {
    pub fn new(x_dim: usize, y_dim: usize, graph: HPolyhedron) -> Result<Self> {
        check_dim(x_dim + y_dim, graph.dim())?;
        Ok(PolySetValuedMap { x_dim, y_dim, graph })
    }

    /// `F(x) = [φ(x), ∞)` for a scalar convex function given as a graph.
    pub fn from_epigraph(epigraph: HPolyhedron) -> Result<Self> {
        let n = epigraph.dim();
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        PolySetValuedMap::new(n - 1, 1, epigraph)
    }

    pub fn x_dim(&self) -> usize {
        self.x_dim
    }

    pub fn y_dim(&self) -> usize {
        self.y_dim
    }

    pub fn graph(&self) -> &HPolyhedron {
        &self.graph
    }

    /// `dom F`, the projection of the graph onto x.
    pub fn map_domain(&self) -> Result<HPolyhedron> {
        let n = self.x_dim + self.y_dim;
        let proj: Matrix = (0..self.x_dim)
            .map(|i| {
                let mut r = zeros(n);
                r[i] = Rat::one();
                r
            })
            .collect();
        linear_image(&proj, &self.graph)
    }

    /// `F(x̄)` as a polyhedron in y-space.
    pub fn map_slice(&self, x: &[Rat]) -> Result<HPolyhedron> {
        check_dim(self.x_dim, x.len())?;
        let pin = |rows: &Matrix, rhs: &Vector| -> (Matrix, Vector) {
            rows.iter()
                .zip(rhs)
                .map(|(r, b)| {
                    let (xs, ys) = r.split_at(self.x_dim);
                    (ys.to_vec(), b - crate::rat::dot(xs, x))
                })
                .unzip()
        };
        let (a, b) = self.graph.ineq();
        let (e, d) = self.graph.eq();
        let (a, b) = pin(a, b);
        let (e, d) = pin(e, d);
        Ok(HPolyhedron::raw(self.y_dim, a, b, e, d))
    }

    fn split<'a>(&self, point: &'a [Rat]) -> Result<(&'a [Rat], &'a [Rat])> {
        check_dim(self.x_dim + self.y_dim, point.len())?;
        Ok(point.split_at(self.x_dim))
    }
}

/// Outcome of checking a one-sided inclusion at sample points `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionCheck {
    pub holds: bool,
    /// Samples that met the hypothesis side and were tested.
    pub checked: usize,
    pub skipped: usize,
    #[serde(with = "serde_rat::opt_vec", default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<Vector>,
}

impl InclusionCheck {
    fn collect(samples: &[Vector], outcomes: Vec<Option<bool>>) -> Self {
        let checked = outcomes.iter().filter(|o| o.is_some()).count();
        let violation = samples.iter().zip(&outcomes).find(|(_, o)| **o == Some(false)).map(|(s, _)| s.clone());
        InclusionCheck { holds: violation.is_none(), checked, skipped: samples.len() - checked, violation }
    }
}

/// `{(x, y) : x ∈ qri(dom F), y ∈ int F(x)} ⊆ qri(gph F)` at the samples.
pub fn check_graph_qri_inclusion(map: &PolySetValuedMap, samples: &[Vector]) -> Result<InclusionCheck> {
    let dom = map.map_domain()?;
    if dom.is_empty() {
        return Ok(InclusionCheck::collect(samples, vec![None; samples.len()]));
    }
    let outcomes = par::try_map(samples, |s| -> Result<Option<bool>> {
        let (x, y) = map.split(s)?;
        if !InteriorKind::Qri.member(&dom, x)? {
            return Ok(None);
        }
        let slice = map.map_slice(x)?;
        if !int_member(&slice, y)? {
            return Ok(None);
        }
        Ok(Some(InteriorKind::Qri.member(&map.graph, s)?))
    })?;
    Ok(InclusionCheck::collect(samples, outcomes))
}

/// `iri(gph F) ⊆ {(x, y) : x ∈ iri(dom F), y ∈ iri F(x)}` at the samples.
pub fn check_graph_iri_inclusion(map: &PolySetValuedMap, samples: &[Vector]) -> Result<InclusionCheck> {
    let dom = map.map_domain()?;
    if dom.is_empty() {
        return Ok(InclusionCheck::collect(samples, vec![None; samples.len()]));
    }
    let outcomes = par::try_map(samples, |s| -> Result<Option<bool>> {
        let (x, y) = map.split(s)?;
        if !InteriorKind::Iri.member(&map.graph, s)? {
            return Ok(None);
        }
        let slice = map.map_slice(x)?;
        Ok(Some(InteriorKind::Iri.member(&dom, x)? && InteriorKind::Iri.member(&slice, y)?))
    })?;
    Ok(InclusionCheck::collect(samples, outcomes))
}

/// Both sides of the graph formula at one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualitySample {
    #[serde(with = "serde_rat::vec")]
    pub point: Vector,
    pub in_qri_graph: bool,
    pub in_product: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualityCheck {
    pub holds: bool,
    pub domain_quasi_regular: bool,
    pub samples: Vec<EqualitySample>,
}

/// Two-sided `qri(gph F) = {(x, y) : x ∈ qri(dom F), y ∈ int F(x)}` at the
/// samples, for maps whose slices over the sampled domain points are solid.
pub fn check_graph_equality(map: &PolySetValuedMap, samples: &[Vector]) -> Result<EqualityCheck> {
    let dom = map.map_domain()?;
    if dom.is_empty() {
        return Err(Error::EmptySet);
    }
    let rows = par::try_map(samples, |s| -> Result<EqualitySample> {
        let (x, y) = map.split(s)?;
        let in_qri_graph = InteriorKind::Qri.member(&map.graph, s)?;
        let in_product = if dom.contains(x) {
            let slice = map.map_slice(x)?;
            if !is_full_dimensional(&slice) {
                return Err(Error::PreconditionFailed(format!(
                    "slice F({}) has empty interior",
                    crate::rat::format_vec(x)
                )));
            }
            InteriorKind::Qri.member(&dom, x)? && int_member(&slice, y)?
        } else {
            false
        };
        Ok(EqualitySample { point: s.clone(), in_qri_graph, in_product })
    })?;
    let holds = rows.iter().all(|r| r.in_qri_graph == r.in_product);
    let domain_quasi_regular = is_quasi_regular(&dom)?.quasi_regular;
    if holds && !domain_quasi_regular {
        return Err(Error::OracleDisagreement("graph formula holds but the domain is not quasi-regular".into()));
    }
    Ok(EqualityCheck { holds, domain_quasi_regular, samples: rows })
}

/// An ordering cone in the codomain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderingCone {
    Polyhedral(PolyCone),
    /// `{(u, v) : u > 0} ∪ {(0, v) : v ≥ 0}`, convex but not closed.
    Lex2D,
}

/// Classification of the order a cone induces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderProperties {
    pub closed: bool,
    pub total: bool,
    pub archimedean: bool,
}

impl OrderingCone {
    pub fn nonnegative_orthant(dim: usize) -> Self {
        OrderingCone::Polyhedral(PolyCone { dim, generators: crate::rat::identity(dim) })
    }

    pub fn dim(&self) -> usize {
        match self {
            OrderingCone::Polyhedral(c) => c.dim,
            OrderingCone::Lex2D => 2,
        }
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        match self {
            OrderingCone::Polyhedral(c) => c.contains(v),
            OrderingCone::Lex2D => lex_contains(v),
        }
    }

    /// Closed polyhedral cones are Archimedean; they are total exactly when
    /// `C ∪ −C` is the whole space, i.e. `C` is a closed half-space or the
    /// space itself. The lexicographic cone is total but not Archimedean.
    pub fn properties(&self) -> OrderProperties {
        match self {
            OrderingCone::Lex2D => OrderProperties { closed: false, total: true, archimedean: false },
            OrderingCone::Polyhedral(c) => {
                let h = c.to_h();
                let (a, _) = h.ineq();
                let (e, _) = h.eq();
                let flat = e.iter().all(|r| r.iter().all(Zero::is_zero));
                let rows: Vec<&Vector> = a.iter().filter(|r| !r.iter().all(Zero::is_zero)).collect();
                let half_space = rows.windows(2).all(|w| crate::rat::primitive(w[0]) == crate::rat::primitive(w[1]));
                OrderProperties { closed: true, total: flat && half_space, archimedean: true }
            }
        }
    }
}

fn lex_contains(v: &[Rat]) -> bool {
    v.len() == 2 && (v[0] > Rat::zero() || (v[0].is_zero() && v[1] >= Rat::zero()))
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum OrderingConeJson {
    Polyhedral {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        #[serde(with = "serde_rat::mat")]
        generators: Matrix,
    },
    Lex2d,
}

impl Serialize for OrderingCone {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            OrderingCone::Polyhedral(c) => {
                OrderingConeJson::Polyhedral { dim: Some(c.dim), generators: c.generators.clone() }.serialize(s)
            }
            OrderingCone::Lex2D => OrderingConeJson::Lex2d.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for OrderingCone {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match OrderingConeJson::deserialize(d)? {
            OrderingConeJson::Lex2d => Ok(OrderingCone::Lex2D),
            OrderingConeJson::Polyhedral { dim, generators } => {
                let dim = dim
                    .or_else(|| generators.first().map(Vec::len))
                    .ok_or_else(|| serde::de::Error::custom("cone dimension unknown: give dim or a generator"))?;
                PolyCone::new(dim, generators).map(OrderingCone::Polyhedral).map_err(serde::de::Error::custom)
            }
        }
    }
}

/// A map `Rˣ → Rʸ`, evaluated exactly.
pub trait VectorMap: Sync {
    fn x_dim(&self) -> usize;
    fn y_dim(&self) -> usize;
    fn eval(&self, x: &[Rat]) -> Vector;
    fn is_affine(&self) -> bool;
}

/// Total affine map, one affine piece per output coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PLVectorFunction {
    pub x_dim: usize,
    pub components: Vec<AffinePiece>,
}

impl PLVectorFunction {
    pub fn new(x_dim: usize, components: Vec<AffinePiece>) -> Result<Self> {
        for c in &components {
            check_dim(x_dim, c.a.len())?;
        }
        Ok(PLVectorFunction { x_dim, components })
    }

    pub fn zero(x_dim: usize, y_dim: usize) -> Self {
        PLVectorFunction { x_dim, components: vec![AffinePiece::new(zeros(x_dim), Rat::zero()); y_dim] }
    }
}

impl VectorMap for PLVectorFunction {
    fn x_dim(&self) -> usize {
        self.x_dim
    }

    fn y_dim(&self) -> usize {
        self.components.len()
    }

    fn eval(&self, x: &[Rat]) -> Vector {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    fn is_affine(&self) -> bool {
        true
    }
}

/// Whether a piecewise component takes the max or the min of its pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Envelope {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseComponent {
    pub envelope: Envelope,
    pub pieces: Vec<AffinePiece>,
}

/// Total piecewise-affine map used as a C-convexity candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseVectorFunction {
    pub x_dim: usize,
    pub components: Vec<PiecewiseComponent>,
}

impl PiecewiseVectorFunction {
    pub fn new(x_dim: usize, components: Vec<PiecewiseComponent>) -> Result<Self> {
        for c in &components {
            if c.pieces.is_empty() {
                return Err(Error::PreconditionFailed("component without pieces".into()));
            }
            for p in &c.pieces {
                check_dim(x_dim, p.a.len())?;
            }
        }
        Ok(PiecewiseVectorFunction { x_dim, components })
    }
}

impl VectorMap for PiecewiseVectorFunction {
    fn x_dim(&self) -> usize {
        self.x_dim
    }

    fn y_dim(&self) -> usize {
        self.components.len()
    }

    fn eval(&self, x: &[Rat]) -> Vector {
        self.components
            .iter()
            .map(|c| {
                let values = c.pieces.iter().map(|p| p.eval(x));
                match c.envelope {
                    Envelope::Max => values.max(),
                    Envelope::Min => values.min(),
                }
                .expect("nonempty pieces")
            })
            .collect()
    }

    fn is_affine(&self) -> bool {
        self.components.iter().all(|c| c.pieces.len() == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityViolation {
    #[serde(with = "serde_rat::vec")]
    pub x1: Vector,
    #[serde(with = "serde_rat::vec")]
    pub x2: Vector,
    #[serde(with = "serde_rat")]
    pub lambda: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityCheck {
    pub convex: bool,
    /// Decided from the form of the map rather than by sampling.
    pub structural: bool,
    pub violation: Option<ConvexityViolation>,
}

/// The mixing weights used by the sampled C-convexity check.
pub fn convexity_weights() -> Vec<Rat> {
    vec![frac(1, 4), frac(1, 2), frac(3, 4)]
}

/// `λf(x₁) + (1−λ)f(x₂) − f(λx₁ + (1−λ)x₂) ∈ C` over all sample pairs.
/// Affine maps are C-convex for every convex cone and pass structurally.
pub fn c_convexity_check(f: &dyn VectorMap, cone: &OrderingCone, trials: &[Vector]) -> Result<ConvexityCheck> {
    check_dim(cone.dim(), f.y_dim())?;
    for t in trials {
        check_dim(f.x_dim(), t.len())?;
    }
    if f.is_affine() {
        return Ok(ConvexityCheck { convex: true, structural: true, violation: None });
    }
    let pairs: Vec<(usize, usize)> =
        (0..trials.len()).flat_map(|i| (0..trials.len()).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let weights = convexity_weights();
    let found = par::map(&pairs, |&(i, j)| {
        let (x1, x2) = (&trials[i], &trials[j]);
        weights.iter().find_map(|l| {
            let mixed_values = lerp(l, &f.eval(x1), &f.eval(x2));
            let gap = sub(&mixed_values, &f.eval(&lerp(l, x1, x2)));
            (!cone.contains(&gap)).then(|| ConvexityViolation { x1: x1.clone(), x2: x2.clone(), lambda: l.clone() })
        })
    });
    let violation = found.into_iter().flatten().next();
    Ok(ConvexityCheck { convex: violation.is_none(), structural: false, violation })
}

/// `epi_C f` in H-form, and whether `dom_C f` is all of x-space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CEpigraph {
    pub set: HPolyhedron,
    pub domain_is_whole_space: bool,
}

/// `{(x, y) : y − f(x) ∈ C}` for affine `f` and closed polyhedral `C` with
/// nonempty interior.
pub fn c_epigraph(f: &PLVectorFunction, cone: &OrderingCone) -> Result<CEpigraph> {
    let c = match cone {
        OrderingCone::Polyhedral(c) => c,
        OrderingCone::Lex2D => {
            return Err(Error::PreconditionFailed("the lexicographic cone is not closed".into()));
        }
    };
    check_dim(c.dim, f.y_dim())?;
    let ch = c.to_h();
    if !is_full_dimensional(&ch) {
        return Err(Error::PreconditionFailed("ordering cone has empty interior".into()));
    }
    let (n, m) = (f.x_dim, f.y_dim());
    let lin: Matrix = f.components.iter().map(|p| p.a.clone()).collect();
    let offset: Vector = f.components.iter().map(|p| p.b.clone()).collect();
    // row r of C's H-form: ⟨r, y − Ax − c⟩ ≤ 0
    let lift = |r: &Vector| -> (Vector, Rat) {
        let mut row: Vector = (0..n).map(|j| -(0..m).map(|i| &r[i] * &lin[i][j]).sum::<Rat>()).collect();
        row.extend(r.iter().cloned());
        (row, crate::rat::dot(r, &offset))
    };
    let (a, b): (Matrix, Vector) = ch.ineq().0.iter().map(lift).unzip();
    let set = HPolyhedron::raw(n + m, a, b, vec![], vec![]);
    let mut base = zeros(n);
    base.extend(f.eval(&zeros(n)));
    debug_assert!(set.contains(&base));
    Ok(CEpigraph { set, domain_is_whole_space: true })
}

/// Membership flags of one sample `(x, y)` against an ordered epigraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpiSampleReport {
    #[serde(with = "serde_rat::vec")]
    pub point: Vector,
    pub in_epi: bool,
    /// `y − f(x) ∈ C \ {0}`.
    pub in_rhs: bool,
    pub in_iri: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpiAnalysis {
    /// `in_iri ⇒ in_rhs` at every sample.
    pub holds: bool,
    pub samples: Vec<EpiSampleReport>,
    /// Samples with `in_rhs` but not `in_iri`: the inclusion is strict there.
    #[serde(with = "serde_rat::mat")]
    pub strict_witnesses: Matrix,
}

impl EpiAnalysis {
    fn from_samples(samples: Vec<EpiSampleReport>) -> Self {
        let holds = samples.iter().all(|s| !s.in_iri || s.in_rhs);
        let strict_witnesses = samples.iter().filter(|s| s.in_rhs && !s.in_iri).map(|s| s.point.clone()).collect();
        EpiAnalysis { holds, samples, strict_witnesses }
    }
}

/// `iri(epi_C f) ⊆ {(x, y) : f(x) <_C y}` at the samples.
pub fn check_iri_c_epi(f: &PLVectorFunction, cone: &OrderingCone, samples: &[Vector]) -> Result<EpiAnalysis> {
    let epi = c_epigraph(f, cone)?;
    let n = f.x_dim;
    let rows = par::try_map(samples, |s| -> Result<EpiSampleReport> {
        check_dim(epi.set.dim(), s.len())?;
        let (x, y) = s.split_at(n);
        let excess = sub(y, &f.eval(x));
        let in_rhs = cone.contains(&excess) && excess.iter().any(|v| !v.is_zero());
        Ok(EpiSampleReport {
            point: s.clone(),
            in_epi: epi.set.contains(s),
            in_rhs,
            in_iri: InteriorKind::Iri.member(&epi.set, s)?,
        })
    })?;
    Ok(EpiAnalysis::from_samples(rows))
}

/// `f ≡ (0, 0)` from `R` into `R²` ordered lexicographically: `epi_C f = R × C`
/// and `iri(epi_C f) = R × {(u, v) : u > 0}`.
pub fn lex_epi_analysis(samples: &[Vector]) -> Result<EpiAnalysis> {
    let rows = samples
        .iter()
        .map(|s| {
            check_dim(3, s.len())?;
            let y = &s[1..];
            let in_epi = lex_contains(y);
            Ok(EpiSampleReport {
                point: s.clone(),
                in_epi,
                in_rhs: in_epi && !(y[0].is_zero() && y[1].is_zero()),
                in_iri: y[0] > Rat::zero(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = EpiAnalysis::from_samples(rows);
    if !out.holds {
        return Err(Error::OracleDisagreement("lexicographic iri escapes the strict epigraph".into()));
    }
    Ok(out)
}

/// `{−1, 0, 1}³`.
pub fn canonical_lex_grid() -> Matrix {
    let vals = [int(-1), int(0), int(1)];
    let mut out = Vec::new();
    for a in &vals {
        for b in &vals {
            for c in &vals {
                out.push(vec![a.clone(), b.clone(), c.clone()]);
            }
        }
    }
    out
}

/// `x ↦ Mx + c` as a vector function.
pub fn affine_map(m: &Matrix, c: &[Rat]) -> Result<PLVectorFunction> {
    let x_dim = m.first().map_or(0, Vec::len);
    let comps = m.iter().zip(c).map(|(r, b)| AffinePiece::new(r.clone(), b.clone())).collect();
    PLVectorFunction::new(x_dim, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::vec_from;

    fn point(v: &[Rat]) -> Vector {
        v.to_vec()
    }

    /// `{(x, y) : 0 ≤ x ≤ 1, 0 ≤ y ≤ x}`.
    fn triangle() -> PolySetValuedMap {
        let a = vec![vec_from(&[-1, 0]), vec_from(&[1, 0]), vec_from(&[0, -1]), vec_from(&[-1, 1])];
        let g = HPolyhedron::from_inequalities(2, a, vec_from(&[0, 1, 0, 0])).unwrap();
        PolySetValuedMap::new(1, 1, g).unwrap()
    }

    /// `F(x) = [|x|, ∞)`.
    fn abs_epi() -> PolySetValuedMap {
        let a = vec![vec_from(&[1, -1]), vec_from(&[-1, -1])];
        PolySetValuedMap::from_epigraph(HPolyhedron::from_inequalities(2, a, vec_from(&[0, 0])).unwrap()).unwrap()
    }

    /// `F(x) = [x, ∞)`.
    fn identity_epi() -> PolySetValuedMap {
        PolySetValuedMap::from_epigraph(
            HPolyhedron::from_inequalities(2, vec![vec_from(&[1, -1])], vec_from(&[0])).unwrap(),
        )
        .unwrap()
    }

    /// Epigraph of `0` on `[0, 1]`.
    fn zero_on_interval() -> PolySetValuedMap {
        let a = vec![vec_from(&[-1, 0]), vec_from(&[1, 0]), vec_from(&[0, -1])];
        PolySetValuedMap::from_epigraph(HPolyhedron::from_inequalities(2, a, vec_from(&[0, 1, 0])).unwrap()).unwrap()
    }

    #[test]
    fn domains() {
        assert!(crate::sets::set_equal(&abs_epi().map_domain().unwrap(), &HPolyhedron::universe(1)).unwrap());
        let d = triangle().map_domain().unwrap();
        assert!(crate::sets::set_equal(&d, &HPolyhedron::boxed(&vec_from(&[0]), &vec_from(&[1]))).unwrap());
        let empty = PolySetValuedMap::new(1, 1, HPolyhedron::empty(2)).unwrap();
        assert!(empty.map_domain().unwrap().is_empty());
    }

    #[test]
    fn slices() {
        let s = abs_epi().map_slice(&vec_from(&[2])).unwrap();
        let ray = HPolyhedron::from_inequalities(1, vec![vec_from(&[-1])], vec_from(&[-2])).unwrap();
        assert!(crate::sets::set_equal(&s, &ray).unwrap());
        let t = triangle().map_slice(&[frac(1, 2)]).unwrap();
        assert!(crate::sets::set_equal(&t, &HPolyhedron::boxed(&[int(0)], &[frac(1, 2)])).unwrap());
        assert!(triangle().map_slice(&vec_from(&[2])).unwrap().is_empty());
    }

    #[test]
    fn qri_inclusion() {
        let r = check_graph_qri_inclusion(&identity_epi(), &[vec_from(&[0, 1])]).unwrap();
        assert!(r.holds && r.checked == 1);
        let r = check_graph_qri_inclusion(&triangle(), &[point(&[frac(1, 2), frac(1, 4)])]).unwrap();
        assert!(r.holds && r.checked == 1);
        let r = check_graph_qri_inclusion(&triangle(), &[point(&[frac(1, 2), frac(1, 2)])]).unwrap();
        assert_eq!((r.checked, r.skipped), (0, 1));
    }

    #[test]
    fn iri_inclusion() {
        let r = check_graph_iri_inclusion(&triangle(), &[point(&[frac(1, 2), frac(1, 4)])]).unwrap();
        assert!(r.holds && r.checked == 1);
        let r = check_graph_iri_inclusion(&triangle(), &[vec_from(&[0, 0])]).unwrap();
        assert!(r.holds && r.checked == 0);
        let diag = HPolyhedron::new(
            2,
            vec![vec_from(&[-1, 0]), vec_from(&[1, 0])],
            vec_from(&[0, 1]),
            vec![vec_from(&[1, -1])],
            vec_from(&[0]),
        )
        .unwrap();
        let f = PolySetValuedMap::new(1, 1, diag).unwrap();
        let r = check_graph_iri_inclusion(&f, &[point(&[frac(1, 2), frac(1, 2)])]).unwrap();
        assert!(r.holds && r.checked == 1);
    }

    #[test]
    fn graph_equality() {
        let r = check_graph_equality(&identity_epi(), &[vec_from(&[0, 1]), vec_from(&[0, 0])]).unwrap();
        assert!(r.holds && r.domain_quasi_regular);
        assert_eq!((r.samples[0].in_qri_graph, r.samples[0].in_product), (true, true));
        assert_eq!((r.samples[1].in_qri_graph, r.samples[1].in_product), (false, false));
        let r = check_graph_equality(&zero_on_interval(), &[point(&[frac(1, 2), int(1)]), vec_from(&[0, 0])]).unwrap();
        assert!(r.holds);
        assert!(r.samples[0].in_qri_graph && r.samples[0].in_product);
        assert!(!r.samples[1].in_qri_graph && !r.samples[1].in_product);
    }

    #[test]
    fn graph_equality_needs_solid_slices() {
        let diag = HPolyhedron::new(2, vec![], vec![], vec![vec_from(&[1, -1])], vec_from(&[0])).unwrap();
        let f = PolySetValuedMap::new(1, 1, diag).unwrap();
        let err = check_graph_equality(&f, &[vec_from(&[0, 0])]).unwrap_err();
        assert!(matches!(err, Error::PreconditionFailed(m) if m.contains("F(0)")));
    }

    fn abs_component(envelope: Envelope, sign: i64) -> PiecewiseComponent {
        PiecewiseComponent {
            envelope,
            pieces: vec![AffinePiece::new(vec_from(&[sign]), int(0)), AffinePiece::new(vec_from(&[-sign]), int(0))],
        }
    }

    fn zero_component() -> PiecewiseComponent {
        PiecewiseComponent { envelope: Envelope::Max, pieces: vec![AffinePiece::new(vec_from(&[0]), int(0))] }
    }

    fn trial_grid() -> Matrix {
        (-2..=2).map(|k| vec_from(&[k])).collect()
    }

    #[test]
    fn c_convexity() {
        let orthant = OrderingCone::nonnegative_orthant(2);
        let affine = affine_map(&vec![vec_from(&[1]), vec_from(&[-3])], &vec_from(&[2, 0])).unwrap();
        let r = c_convexity_check(&affine, &OrderingCone::Lex2D, &trial_grid()).unwrap();
        assert!(r.convex && r.structural);
        let abs = PiecewiseVectorFunction::new(1, vec![abs_component(Envelope::Max, 1), zero_component()]).unwrap();
        assert!(c_convexity_check(&abs, &orthant, &trial_grid()).unwrap().convex);
        let neg_abs = PiecewiseVectorFunction::new(1, vec![abs_component(Envelope::Min, -1), zero_component()]).unwrap();
        let r = c_convexity_check(&neg_abs, &orthant, &[vec_from(&[-1]), vec_from(&[1])]).unwrap();
        assert!(!r.convex);
        let v = r.violation.unwrap();
        assert!(v.x1 == vec_from(&[-1]) && v.x2 == vec_from(&[1]));
        let midpoint = lerp(&frac(1, 2), &neg_abs.eval(&vec_from(&[-1])), &neg_abs.eval(&vec_from(&[1])));
        assert!(!orthant.contains(&sub(&midpoint, &neg_abs.eval(&vec_from(&[0])))));
    }

    #[test]
    fn c_epigraphs() {
        let orthant = OrderingCone::nonnegative_orthant(2);
        let e = c_epigraph(&PLVectorFunction::zero(1, 2), &orthant).unwrap();
        let expected = HPolyhedron::from_inequalities(3, vec![vec_from(&[0, -1, 0]), vec_from(&[0, 0, -1])], vec_from(&[0, 0]))
            .unwrap();
        assert!(crate::sets::set_equal(&e.set, &expected).unwrap());
        assert!(e.domain_is_whole_space);
        let diag = affine_map(&vec![vec_from(&[1]), vec_from(&[1])], &vec_from(&[0, 0])).unwrap();
        let e = c_epigraph(&diag, &orthant).unwrap();
        let expected = HPolyhedron::from_inequalities(3, vec![vec_from(&[1, -1, 0]), vec_from(&[1, 0, -1])], vec_from(&[0, 0]))
            .unwrap();
        assert!(crate::sets::set_equal(&e.set, &expected).unwrap());
        let ray = OrderingCone::Polyhedral(PolyCone::new(2, vec![vec_from(&[1, 0])]).unwrap());
        assert!(matches!(c_epigraph(&diag, &ray), Err(Error::PreconditionFailed(_))));
        assert!(matches!(c_epigraph(&diag, &OrderingCone::Lex2D), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn iri_of_ordered_epigraph() {
        let orthant = OrderingCone::nonnegative_orthant(2);
        let f = PLVectorFunction::zero(1, 2);
        let r = check_iri_c_epi(&f, &orthant, &[vec_from(&[0, 1, 1]), vec_from(&[0, 1, 0]), vec_from(&[0, 0, 0])])
            .unwrap();
        assert!(r.holds);
        assert!(r.samples[0].in_iri && r.samples[0].in_rhs);
        assert!(!r.samples[1].in_iri && r.samples[1].in_rhs);
        assert!(!r.samples[2].in_iri && !r.samples[2].in_rhs);
        assert_eq!(r.strict_witnesses, vec![vec_from(&[0, 1, 0])]);
    }

    #[test]
    fn lexicographic_epigraph() {
        let r = lex_epi_analysis(&[vec_from(&[7, 1, -5]), vec_from(&[7, 0, 1]), vec_from(&[7, 0, 0])]).unwrap();
        assert!(r.samples[0].in_iri);
        assert!(r.samples[1].in_rhs && !r.samples[1].in_iri);
        assert!(r.samples[2].in_epi && !r.samples[2].in_rhs && !r.samples[2].in_iri);
        let grid = lex_epi_analysis(&canonical_lex_grid()).unwrap();
        assert!(grid.holds && !grid.strict_witnesses.is_empty());
    }

    #[test]
    fn order_classification() {
        let p = OrderingCone::nonnegative_orthant(2).properties();
        assert!(p.closed && p.archimedean && !p.total);
        let l = OrderingCone::Lex2D.properties();
        assert!(!l.closed && l.total && !l.archimedean);
        let half_line = OrderingCone::nonnegative_orthant(1).properties();
        assert!(half_line.total && half_line.archimedean);
    }

    #[test]
    fn cone_json() {
        let c: OrderingCone = serde_json::from_str(r#"{"kind":"polyhedral","generators":[["1","0"],["0","1"]]}"#).unwrap();
        assert_eq!(c, OrderingCone::nonnegative_orthant(2));
        let l: OrderingCone = serde_json::from_str(r#"{"kind":"lex2d"}"#).unwrap();
        assert_eq!(l, OrderingCone::Lex2D);
        let back: OrderingCone = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let m: PolySetValuedMap =
            serde_json::from_str(&format!(r#"{{"x_dim":1,"y_dim":1,"graph":{}}}"#, serde_json::to_string(triangle().graph()).unwrap()))
                .unwrap();
        assert_eq!(m.x_dim(), 1);
    }
}
