//! Primal and dual values of `inf f − g` and `sup g_* − f*`, the qualification
//! conditions that force them to agree, and dual-certificate extraction.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::functions::{concave_conjugate, conjugate, continuity_diagnostics, ExtRat, PLConcaveFunction, PLConvexFunction};
use crate::interiors::{is_full_dimensional, is_quasi_regular};
use crate::ratlp::{solve_unchecked, LpOutcome, LpProblem};
use crate::rat::{serde_rat, zeros, Matrix, Rat, Vector};
use crate::separation::{properly_separate_sets, ri_intersect, SeparationCertificate};
use crate::sets::{minkowski_difference, translate};

/// An extended value together with an attaining point when finite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Optimum {
    pub value: ExtRat,
    #[serde(with = "serde_rat::opt_vec", default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vector>,
}

/// `inf_x f(x) − g(x)` for convex `f` and concave `g`, from one LP over
/// `(x, λ, μ)` with `(x, λ) ∈ epi f`, `(x, μ) ∈ hypo g`, maximizing `μ − λ`.
fn inf_difference(f: &PLConvexFunction, g: &PLConcaveFunction) -> Result<Optimum> {
    check_dim(f.dim(), g.dim())?;
    let n = f.dim();
    let epi = f.epigraph();
    let hypo = g.hypograph();
    // columns: x (n), λ, μ
    let place = |row: &Vector, slot: usize| {
        let mut r = row[..n].to_vec();
        r.extend([Rat::zero(), Rat::zero()]);
        r[n + slot] = row[n].clone();
        r
    };
    let (ea, eb) = epi.ineq();
    let (ee, ed) = epi.eq();
    let (ha, hb) = hypo.ineq();
    let (he, hd) = hypo.eq();
    let a: Matrix = ea.iter().map(|r| place(r, 0)).chain(ha.iter().map(|r| place(r, 1))).collect();
    let b: Vector = eb.iter().chain(hb).cloned().collect();
    let e: Matrix = ee.iter().map(|r| place(r, 0)).chain(he.iter().map(|r| place(r, 1))).collect();
    let d: Vector = ed.iter().chain(hd).cloned().collect();
    let mut objective = zeros(n + 2);
    objective[n] = -Rat::one();
    objective[n + 1] = Rat::one();
    Ok(match solve_unchecked(&LpProblem::new(objective, a, b, e, d)) {
        LpOutcome::Infeasible => Optimum { value: ExtRat::PosInf, point: None },
        LpOutcome::Unbounded { .. } => Optimum { value: ExtRat::NegInf, point: None },
        LpOutcome::Optimal { value, point } => Optimum { value: ExtRat::Finite(-value), point: Some(point[..n].to_vec()) },
    })
}

/// `inf{f(x) − g(x)}`: `+∞` when the domains are disjoint, `−∞` when unbounded.
pub fn solve_primal(f: &PLConvexFunction, g: &PLConcaveFunction) -> Result<Optimum> {
    inf_difference(f, g)
}

/// `sup{g_*(y) − f*(y)}` over the conjugates, with an attaining `y`.
pub fn solve_dual(f: &PLConvexFunction, g: &PLConcaveFunction) -> Result<Optimum> {
    check_dim(f.dim(), g.dim())?;
    let f_star = conjugate(f).function;
    let g_star = concave_conjugate(g).as_concave().expect("concave conjugate");
    let inner = inf_difference(&f_star, &g_star)?;
    Ok(Optimum { value: inner.value.neg(), point: inner.point })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiRegularFlags {
    pub domain_difference: bool,
    pub epigraph: bool,
    pub epi_minus_hypo: bool,
}

impl QuasiRegularFlags {
    pub fn all(&self) -> bool {
        self.domain_difference && self.epigraph && self.epi_minus_hypo
    }
}

/// The four interior conditions of the continuity-based corollary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteriorFlags {
    pub continuous_somewhere: bool,
    pub bounded_on_open_sets: bool,
    pub epi_hypo_interiors: bool,
    pub domain_interiors: bool,
}

impl InteriorFlags {
    pub fn any(&self) -> bool {
        self.continuous_somewhere || self.bounded_on_open_sets || self.epi_hypo_interiors || self.domain_interiors
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qualification {
    pub qual_qri: bool,
    pub qual_quasi_regular: QuasiRegularFlags,
    pub qual_ri: bool,
    pub qual_interior: InteriorFlags,
}

impl Qualification {
    /// Names of the sufficient conditions that hold.
    pub fn routes(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.qual_qri && self.qual_quasi_regular.all() {
            out.push("qri".to_string());
        }
        if self.qual_ri {
            out.push("ri".to_string());
        }
        if self.qual_qri && self.qual_interior.any() {
            out.push("interior".to_string());
        }
        out
    }
}

/// Qualification flags, each from its own oracle. The qri condition is
/// decided through proper separation of the domains and cross-checked
/// against the relative-interior LP.
pub fn qualification_report(f: &PLConvexFunction, g: &PLConcaveFunction) -> Result<Qualification> {
    check_dim(f.dim(), g.dim())?;
    let (df, dg) = (f.domain(), g.domain());
    let qual_qri = properly_separate_sets(df, dg)?.is_none();
    let qual_ri = ri_intersect(df, dg)?;
    if qual_qri != qual_ri {
        return Err(Error::OracleDisagreement(format!(
            "qri qualification {qual_qri} but ri qualification {qual_ri}"
        )));
    }
    let epi = f.epigraph();
    let hypo = g.hypograph();
    let qual_quasi_regular = QuasiRegularFlags {
        domain_difference: is_quasi_regular(&minkowski_difference(df, dg)?)?.quasi_regular,
        epigraph: is_quasi_regular(&epi)?.quasi_regular,
        epi_minus_hypo: is_quasi_regular(&minkowski_difference(&epi, &hypo)?)?.quasi_regular,
    };
    let cf = continuity_diagnostics(f)?;
    let cg = continuity_diagnostics(&g.negated())?;
    let qual_interior = InteriorFlags {
        continuous_somewhere: cf.int_dom_nonempty && cg.int_dom_nonempty,
        bounded_on_open_sets: cf.bounded_above_on_open_set && cg.bounded_above_on_open_set,
        epi_hypo_interiors: is_full_dimensional(&epi) && is_full_dimensional(&hypo),
        domain_interiors: is_full_dimensional(df) && is_full_dimensional(dg),
    };
    Ok(Qualification { qual_qri, qual_quasi_regular, qual_ri, qual_interior })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub primal_value: ExtRat,
    pub dual_value: ExtRat,
    #[serde(with = "serde_rat::opt", default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<Rat>,
    #[serde(flatten)]
    pub qualification: Qualification,
    #[serde(with = "serde_rat::opt_vec", default, skip_serializing_if = "Option::is_none")]
    pub primal_optimizer: Option<Vector>,
    #[serde(with = "serde_rat::opt_vec", default, skip_serializing_if = "Option::is_none")]
    pub dual_optimizer: Option<Vector>,
    pub weak_duality: bool,
    pub strong_duality: bool,
    /// Qualification routes that certify strong duality on this instance.
    pub routes: Vec<String>,
}

/// Weak duality only: `(primal, dual)` with `primal ≥ dual` checked.
pub fn duality_values(f: &PLConvexFunction, g: &PLConcaveFunction) -> Result<(Optimum, Optimum)> {
    let primal = solve_primal(f, g)?;
    let dual = solve_dual(f, g)?;
    if primal.value < dual.value {
        return Err(Error::OracleDisagreement(format!(
            "weak duality violated: primal {} < dual {}",
            primal.value, dual.value
        )));
    }
    Ok((primal, dual))
}

/// Full report. Weak duality is asserted always; a nonzero gap under a
/// certifying route is an error.
pub fn verify_fenchel_rockafellar(f: &PLConvexFunction, g: &PLConcaveFunction) -> Result<DualityReport> {
    let (primal, dual) = duality_values(f, g)?;
    let qualification = qualification_report(f, g)?;
    let routes = qualification.routes();
    let gap = match (&primal.value, &dual.value) {
        (ExtRat::Finite(p), ExtRat::Finite(d)) => Some(p - d),
        _ => None,
    };
    let strong = primal.value == dual.value;
    if !routes.is_empty() && !strong {
        return Err(Error::OracleDisagreement(format!(
            "qualified by {routes:?} yet primal {} != dual {}",
            primal.value, dual.value
        )));
    }
    Ok(DualityReport {
        primal_value: primal.value,
        dual_value: dual.value,
        gap,
        qualification,
        primal_optimizer: primal.point,
        dual_optimizer: dual.point,
        weak_duality: true,
        strong_duality: strong,
        routes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualCertificate {
    #[serde(with = "serde_rat::vec")]
    pub x_star: Vector,
    pub g_star_value: ExtRat,
    pub f_star_value: ExtRat,
    #[serde(with = "serde_rat")]
    pub alpha: Rat,
    pub separation: SeparationCertificate,
}

/// Separates `hypo g + (0, α)` (side A) from `epi f` (side B); the functional
/// `(ū, β)` has `β > 0` under qualification and yields `x̄* = −ū/β` with
/// `g_*(x̄*) − f*(x̄*) ≥ α`.
pub fn extract_dual_certificate(f: &PLConvexFunction, g: &PLConcaveFunction, alpha: &Rat) -> Result<DualCertificate> {
    check_dim(f.dim(), g.dim())?;
    let n = f.dim();
    let mut shift = zeros(n + 1);
    shift[n] = alpha.clone();
    let lowered = translate(&g.hypograph(), &shift)?;
    let epi = f.epigraph();
    let sep = properly_separate_sets(&lowered, &epi)?.ok_or_else(|| {
        Error::PreconditionFailed("relative interiors meet: alpha exceeds the primal value".into())
    })?;
    let beta = sep.functional[n].clone();
    if beta.is_zero() {
        return Err(Error::QualificationFailure(
            "separating functional is vertical, so the domains are properly separated".into(),
        ));
    }
    if beta < Rat::zero() {
        return Err(Error::OracleDisagreement("separating functional points down into the epigraph".into()));
    }
    let x_star: Vector = sep.functional[..n].iter().map(|u| -u / &beta).collect();
    let f_star_value = conjugate(f).evaluate(&x_star)?;
    let g_star_value = concave_conjugate(g).evaluate(&x_star)?;
    let achieved = g_star_value.sub(&f_star_value)?;
    if achieved < ExtRat::Finite(alpha.clone()) {
        return Err(Error::OracleDisagreement(format!(
            "certificate value {achieved} is below alpha {}",
            crate::rat::format(alpha)
        )));
    }
    Ok(DualCertificate { x_star, g_star_value, f_star_value, alpha: alpha.clone(), separation: sep })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::AffinePiece;
    use crate::rat::{int, vec_from};
    use crate::sets::HPolyhedron;

    fn abs() -> PLConvexFunction {
        PLConvexFunction::new(
            1,
            vec![AffinePiece::new(vec_from(&[1]), int(0)), AffinePiece::new(vec_from(&[-1]), int(0))],
            HPolyhedron::universe(1),
        )
        .unwrap()
    }

    fn neg_abs_shifted() -> PLConcaveFunction {
        PLConcaveFunction::new(
            1,
            vec![AffinePiece::new(vec_from(&[1]), int(-1)), AffinePiece::new(vec_from(&[-1]), int(1))],
            HPolyhedron::universe(1),
        )
        .unwrap()
    }

    fn nonpositive_indicator() -> PLConvexFunction {
        PLConvexFunction::indicator(HPolyhedron::from_inequalities(1, vec![vec_from(&[1])], vec_from(&[0])).unwrap())
            .unwrap()
    }

    fn fin(k: i64) -> ExtRat {
        ExtRat::Finite(int(k))
    }

    #[test]
    fn abs_pair() {
        let (f, g) = (abs(), neg_abs_shifted());
        assert_eq!(solve_primal(&f, &g).unwrap().value, fin(1));
        let d = solve_dual(&f, &g).unwrap();
        assert_eq!(d.value, fin(1));
        assert_eq!(d.point, Some(vec_from(&[1])));
        let r = verify_fenchel_rockafellar(&f, &g).unwrap();
        assert_eq!(r.gap, Some(int(0)));
        assert!(r.qualification.qual_qri && r.qualification.qual_ri && r.qualification.qual_quasi_regular.all());
        assert!(r.qualification.qual_interior.any());
        assert_eq!(r.routes, vec!["qri", "ri", "interior"]);
        let c = extract_dual_certificate(&f, &g, &int(1)).unwrap();
        assert_eq!(c.x_star, vec_from(&[1]));
        assert_eq!(c.g_star_value.sub(&c.f_star_value).unwrap(), fin(1));
    }

    #[test]
    fn zero_pair() {
        let f = PLConvexFunction::affine(vec_from(&[0]), int(0));
        let g = PLConcaveFunction::affine(vec_from(&[0]), int(0));
        assert_eq!(solve_primal(&f, &g).unwrap().value, fin(0));
        let d = solve_dual(&f, &g).unwrap();
        assert_eq!((d.value, d.point), (fin(0), Some(vec_from(&[0]))));
        assert!(verify_fenchel_rockafellar(&f, &g).unwrap().strong_duality);
        assert_eq!(extract_dual_certificate(&f, &g, &int(0)).unwrap().x_star, vec_from(&[0]));
    }

    #[test]
    fn indicator_pair() {
        let f = nonpositive_indicator();
        let g = PLConcaveFunction::affine(vec_from(&[1]), int(0));
        assert_eq!(solve_primal(&f, &g).unwrap().value, fin(0));
        let d = solve_dual(&f, &g).unwrap();
        assert_eq!((d.value, d.point), (fin(0), Some(vec_from(&[1]))));
        let r = verify_fenchel_rockafellar(&f, &g).unwrap();
        assert!(r.qualification.qual_qri && r.strong_duality);
        assert_eq!(extract_dual_certificate(&f, &g, &int(0)).unwrap().x_star, vec_from(&[1]));
    }

    #[test]
    fn disjoint_domains() {
        let f = PLConvexFunction::indicator(HPolyhedron::point(&vec_from(&[0]))).unwrap();
        let g = PLConcaveFunction::indicator(HPolyhedron::point(&vec_from(&[1]))).unwrap();
        let q = qualification_report(&f, &g).unwrap();
        assert!(!q.qual_qri && !q.qual_ri);
        assert_eq!(solve_primal(&f, &g).unwrap().value, ExtRat::PosInf);
        let r = verify_fenchel_rockafellar(&f, &g).unwrap();
        assert!(r.weak_duality);
    }

    #[test]
    fn touching_intervals_fail_qualification() {
        let f = PLConvexFunction::indicator(HPolyhedron::boxed(&vec_from(&[0]), &vec_from(&[1]))).unwrap();
        let g = PLConcaveFunction::indicator(HPolyhedron::boxed(&vec_from(&[1]), &vec_from(&[2]))).unwrap();
        let q = qualification_report(&f, &g).unwrap();
        assert!(!q.qual_qri);
        assert!(q.routes().is_empty());
    }

    #[test]
    fn unbounded_primal() {
        let f = PLConvexFunction::affine(vec_from(&[1]), int(0));
        let g = PLConcaveFunction::affine(vec_from(&[0]), int(0));
        assert_eq!(solve_primal(&f, &g).unwrap().value, ExtRat::NegInf);
        assert_eq!(solve_dual(&f, &g).unwrap().value, ExtRat::NegInf);
    }

    #[test]
    fn report_json_uses_strings() {
        let r = verify_fenchel_rockafellar(&abs(), &neg_abs_shifted()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["primal_value"], "1");
        assert_eq!(v["dual_value"], "1");
        assert_eq!(v["gap"], "0");
        assert_eq!(v["qual_qri"], true);
    }
}
