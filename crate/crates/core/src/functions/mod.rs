//! Piecewise-linear convex and concave functions on polyhedral domains and
//! their Fenchel conjugates.

mod ext;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use ext::ExtRat;

use crate::error::{check_dim, Error, Result};
use crate::interiors::is_full_dimensional;
use crate::ratlp::{solve_unchecked, LpOutcome, LpProblem};
use crate::rat::{dot, neg, serde_rat, zeros, Matrix, Rat, Vector};
use crate::sets::HPolyhedron;

/// `x ↦ ⟨a, x⟩ + b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffinePiece {
    #[serde(with = "serde_rat::vec")]
    pub a: Vector,
    #[serde(with = "serde_rat")]
    pub b: Rat,
}

impl AffinePiece {
    pub fn new(a: Vector, b: Rat) -> Self {
        AffinePiece { a, b }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot(&self.a, x) + &self.b
    }

    fn negated(&self) -> Self {
        AffinePiece { a: neg(&self.a), b: -self.b.clone() }
    }
}

fn validate(dim: usize, pieces: &[AffinePiece], domain: &HPolyhedron) -> Result<()> {
    if pieces.is_empty() {
        return Err(Error::PreconditionFailed("a piecewise-linear function needs at least one piece".into()));
    }
    check_dim(dim, domain.dim())?;
    for p in pieces {
        check_dim(dim, p.a.len())?;
    }
    if domain.is_empty() {
        return Err(Error::PreconditionFailed("domain is empty, so the function is not proper".into()));
    }
    Ok(())
}

/// `f(x) = max_i ⟨a_i, x⟩ + b_i` on `domain`, `+∞` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct PLConvexFunction {
    dim: usize,
    pieces: Vec<AffinePiece>,
    domain: HPolyhedron,
}

/// `g(x) = min_i ⟨a_i, x⟩ + b_i` on `domain`, `−∞` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct PLConcaveFunction {
    dim: usize,
    pieces: Vec<AffinePiece>,
    domain: HPolyhedron,
}

impl PLConvexFunction {
    pub fn new(dim: usize, pieces: Vec<AffinePiece>, domain: HPolyhedron) -> Result<Self> {
        validate(dim, &pieces, &domain)?;
        Ok(PLConvexFunction { dim, pieces, domain })
    }

    /// A single affine piece on all of `Rⁿ`.
    pub fn affine(a: Vector, b: Rat) -> Self {
        let dim = a.len();
        PLConvexFunction { dim, pieces: vec![AffinePiece::new(a, b)], domain: HPolyhedron::universe(dim) }
    }

    /// Indicator of a nonempty polyhedron.
    pub fn indicator(domain: HPolyhedron) -> Result<Self> {
        let dim = domain.dim();
        Self::new(dim, vec![AffinePiece::new(zeros(dim), Rat::zero())], domain)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn domain(&self) -> &HPolyhedron {
        &self.domain
    }

    pub fn evaluate(&self, x: &[Rat]) -> Result<ExtRat> {
        check_dim(self.dim, x.len())?;
        if !self.domain.contains(x) {
            return Ok(ExtRat::PosInf);
        }
        let best = self.pieces.iter().map(|p| p.eval(x)).max().expect("pieces are nonempty");
        Ok(ExtRat::Finite(best))
    }

    /// `{(x, λ) : x ∈ dom f, λ ≥ ⟨a_i, x⟩ + b_i ∀i}`.
    pub fn epigraph(&self) -> HPolyhedron {
        stacked_graph(self.dim, &self.pieces, &self.domain, true)
    }

    pub fn negated(&self) -> PLConcaveFunction {
        PLConcaveFunction {
            dim: self.dim,
            pieces: self.pieces.iter().map(AffinePiece::negated).collect(),
            domain: self.domain.clone(),
        }
    }
}

impl PLConcaveFunction {
    pub fn new(dim: usize, pieces: Vec<AffinePiece>, domain: HPolyhedron) -> Result<Self> {
        validate(dim, &pieces, &domain)?;
        Ok(PLConcaveFunction { dim, pieces, domain })
    }

    pub fn affine(a: Vector, b: Rat) -> Self {
        let dim = a.len();
        PLConcaveFunction { dim, pieces: vec![AffinePiece::new(a, b)], domain: HPolyhedron::universe(dim) }
    }

    /// `0` on `domain`, `−∞` elsewhere.
    pub fn indicator(domain: HPolyhedron) -> Result<Self> {
        let dim = domain.dim();
        Self::new(dim, vec![AffinePiece::new(zeros(dim), Rat::zero())], domain)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn domain(&self) -> &HPolyhedron {
        &self.domain
    }

    pub fn evaluate(&self, x: &[Rat]) -> Result<ExtRat> {
        check_dim(self.dim, x.len())?;
        if !self.domain.contains(x) {
            return Ok(ExtRat::NegInf);
        }
        let best = self.pieces.iter().map(|p| p.eval(x)).min().expect("pieces are nonempty");
        Ok(ExtRat::Finite(best))
    }

    /// `{(x, μ) : x ∈ dom g, μ ≤ ⟨a_i, x⟩ + b_i ∀i}`.
    pub fn hypograph(&self) -> HPolyhedron {
        stacked_graph(self.dim, &self.pieces, &self.domain, false)
    }

    /// `−g`, a convex function.
    pub fn negated(&self) -> PLConvexFunction {
        PLConvexFunction {
            dim: self.dim,
            pieces: self.pieces.iter().map(AffinePiece::negated).collect(),
            domain: self.domain.clone(),
        }
    }
}

fn stacked_graph(n: usize, pieces: &[AffinePiece], domain: &HPolyhedron, above: bool) -> HPolyhedron {
    let lift = |row: &Vector| {
        let mut r = row.clone();
        r.push(Rat::zero());
        r
    };
    let (da, db) = domain.ineq();
    let (de, dd) = domain.eq();
    let mut a: Matrix = da.iter().map(lift).collect();
    let mut b = db.clone();
    for p in pieces {
        // above: ⟨a, x⟩ − λ ≤ −b; below: −⟨a, x⟩ + μ ≤ b
        let mut row = if above { p.a.clone() } else { neg(&p.a) };
        row.push(if above { -Rat::one() } else { Rat::one() });
        a.push(row);
        b.push(if above { -p.b.clone() } else { p.b.clone() });
    }
    HPolyhedron::raw(n + 1, a, b, de.iter().map(lift).collect(), dd.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualKind {
    /// `function` is `f*`.
    Convex,
    /// `function` is `−g_*`.
    ConcaveNegated,
}

/// A conjugate stored as a convex PL function, together with how to read it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PLFunctionDual {
    pub kind: DualKind,
    pub function: PLConvexFunction,
}

impl PLFunctionDual {
    /// `f*(y)` or `g_*(y)`.
    pub fn evaluate(&self, y: &[Rat]) -> Result<ExtRat> {
        let v = self.function.evaluate(y)?;
        Ok(match self.kind {
            DualKind::Convex => v,
            DualKind::ConcaveNegated => v.neg(),
        })
    }

    /// `g_*` as a concave function; `None` for a convex conjugate.
    pub fn as_concave(&self) -> Option<PLConcaveFunction> {
        (self.kind == DualKind::ConcaveNegated).then(|| self.function.negated())
    }
}

/// `f*(y) = sup_x ⟨y, x⟩ − f(x)` read off the generators of `epi f`: every
/// point `(v, λ)` gives the piece `y ↦ ⟨v, y⟩ − λ`, every ray `(d, δ)` the
/// domain row `⟨y, d⟩ ≤ δ`.
pub fn conjugate(f: &PLConvexFunction) -> PLFunctionDual {
    let n = f.dim;
    let epi = f.epigraph();
    let v = epi.vrep();
    let pieces = v
        .points()
        .iter()
        .map(|p| AffinePiece::new(p[..n].to_vec(), -p[n].clone()))
        .collect::<Vec<_>>();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for r in v.rays() {
        let d = &r[..n];
        if d.iter().all(Zero::is_zero) && !r[n].is_negative() {
            continue;
        }
        if !a.iter().zip(&b).any(|(x, y): (&Vector, &Rat)| x.as_slice() == d && *y == r[n]) {
            a.push(d.to_vec());
            b.push(r[n].clone());
        }
    }
    let domain = HPolyhedron::raw(n, a, b, vec![], vec![]);
    PLFunctionDual { kind: DualKind::Convex, function: PLConvexFunction { dim: n, pieces, domain } }
}

/// `g_*(y) = inf_x ⟨y, x⟩ − g(x) = −(−g)*(−y)`, stored as the convex
/// `y ↦ (−g)*(−y)`.
pub fn concave_conjugate(g: &PLConcaveFunction) -> PLFunctionDual {
    let h = conjugate(&g.negated()).function;
    let pieces = h.pieces.iter().map(|p| AffinePiece::new(neg(&p.a), p.b.clone())).collect();
    let (a, b) = h.domain.ineq();
    let (e, d) = h.domain.eq();
    let domain = HPolyhedron::raw(h.dim, a.iter().map(|r| neg(r)).collect(), b.clone(), e.iter().map(|r| neg(r)).collect(), d.clone());
    PLFunctionDual {
        kind: DualKind::ConcaveNegated,
        function: PLConvexFunction { dim: h.dim, pieces, domain },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub int_dom_nonempty: bool,
    pub int_epi_nonempty: bool,
    pub bounded_above_on_open_set: bool,
    /// Center and radius of an open box inside the domain, with an upper bound
    /// of `f` on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<BoundedBox>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedBox {
    #[serde(with = "serde_rat::vec")]
    pub center: Vector,
    #[serde(with = "serde_rat")]
    pub radius: Rat,
    #[serde(with = "serde_rat")]
    pub upper_bound: Rat,
}

/// Largest `t ≤ 1` such that the box of radius `t` around some point fits in
/// the domain, with the point.
fn inscribed_box(domain: &HPolyhedron) -> Option<(Vector, Rat)> {
    let n = domain.dim();
    let (de, _) = domain.eq();
    if de.iter().any(|r| !r.iter().all(Zero::is_zero)) {
        return None;
    }
    let (da, db) = domain.ineq();
    let mut a: Matrix = da
        .iter()
        .map(|r| {
            let mut row = r.clone();
            row.push(r.iter().map(|x| x.abs()).fold(Rat::zero(), |s, x| s + x));
            row
        })
        .collect();
    let mut b = db.clone();
    let mut cap = zeros(n + 1);
    cap[n] = Rat::one();
    a.push(cap.clone());
    b.push(Rat::one());
    match solve_unchecked(&LpProblem::new(cap, a, b, vec![], vec![])) {
        LpOutcome::Optimal { value, point } if value.is_positive() => Some((point[..n].to_vec(), value)),
        _ => None,
    }
}

/// The three continuity flags. They coincide for PL convex functions; a
/// disagreement is reported as an error.
pub fn continuity_diagnostics(f: &PLConvexFunction) -> Result<ContinuityReport> {
    let int_dom = is_full_dimensional(&f.domain);
    let int_epi = is_full_dimensional(&f.epigraph());
    let witness = inscribed_box(&f.domain).map(|(center, radius)| {
        let upper_bound = f
            .pieces
            .iter()
            .map(|p| {
                let l1 = p.a.iter().map(|x| x.abs()).fold(Rat::zero(), |s, x| s + x);
                p.eval(&center) + &radius * l1
            })
            .max()
            .expect("pieces are nonempty");
        BoundedBox { center, radius, upper_bound }
    });
    let bounded = witness.is_some();
    if int_dom != int_epi || int_dom != bounded {
        return Err(Error::OracleDisagreement(format!(
            "continuity flags differ: int dom {int_dom}, int epi {int_epi}, bounded {bounded}"
        )));
    }
    Ok(ContinuityReport {
        int_dom_nonempty: int_dom,
        int_epi_nonempty: int_epi,
        bounded_above_on_open_set: bounded,
        witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionKind {
    Convex,
    Concave,
}

/// Wire form `{"kind", "dim", "pieces": [{"a", "b"}], "domain"}`; a missing
/// domain means all of `Rⁿ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PLFunctionJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<FunctionKind>,
    pub dim: usize,
    pub pieces: Vec<AffinePiece>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<HPolyhedron>,
}

impl PLFunctionJson {
    fn parts(self, want: FunctionKind) -> Result<(usize, Vec<AffinePiece>, HPolyhedron)> {
        if let Some(k) = self.kind {
            if k != want {
                return Err(Error::Parse(format!("expected a {want:?} function, found {k:?}").to_lowercase()));
            }
        }
        let domain = self.domain.unwrap_or_else(|| HPolyhedron::universe(self.dim));
        Ok((self.dim, self.pieces, domain))
    }
}

macro_rules! wire_impls {
    ($ty:ident, $kind:expr) => {
        impl TryFrom<PLFunctionJson> for $ty {
            type Error = Error;

            fn try_from(j: PLFunctionJson) -> Result<Self> {
                let (dim, pieces, domain) = j.parts($kind)?;
                $ty::new(dim, pieces, domain)
            }
        }

        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                PLFunctionJson {
                    kind: Some($kind),
                    dim: self.dim,
                    pieces: self.pieces.clone(),
                    domain: Some(self.domain.clone()),
                }
                .serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let j = PLFunctionJson::deserialize(d)?;
                $ty::try_from(j).map_err(serde::de::Error::custom)
            }
        }
    };
}

wire_impls!(PLConvexFunction, FunctionKind::Convex);
wire_impls!(PLConcaveFunction, FunctionKind::Concave);
