//! Property-suite runner: each criterion generates its instances from the
//! seed, checks them in parallel, and reports deterministically.

use serde::{Deserialize, Serialize};

use crate::calculus::{check_image_iri, check_image_qri, default_samples, DEFAULT_SEED};
use crate::duality::{duality_values, extract_dual_certificate, verify_fenchel_rockafellar};
use crate::error::{Error, Result};
use crate::functions::{AffinePiece, ExtRat, PLConcaveFunction, PLConvexFunction};
use crate::generate::{self, stream_seed, Overlap};
use crate::graphs_orders::{
    canonical_lex_grid, check_graph_equality, check_graph_iri_inclusion, check_graph_qri_inclusion,
    check_iri_c_epi, lex_epi_analysis, OrderingCone, PLVectorFunction,
};
use crate::interiors::{
    default_segment_samples, iri_member, nonsupport_point, normal_cone, polar, qri_member, relatively_absorbing,
    ri_member, segment_check, spread, sweep_points, InteriorKind,
};
use crate::par;
use crate::rat::{format_vec, frac, int, mat_vec, vec_from, Matrix, Rat, Vector};
use crate::separation::{properly_separate_point, properly_separate_sets, ri_intersect};
use crate::seqlab::{
    default_epsilon, ell1ball_iri, ell1ball_normal_test, ell1ball_qri, nonneg_ball_iri_refutation, TailSequence,
};
use crate::sets::{difference_cone, HPolyhedron};

/// Failure traces kept per criterion.
const TRACE_LIMIT: usize = 20;

pub const CRITERIA: [(u32, &str); 8] = [
    (1, "interior-equivalence"),
    (2, "polar-identities"),
    (3, "separation-biconditional"),
    (4, "fenchel-rockafellar"),
    (5, "sequence-examples"),
    (6, "graphs-and-orders"),
    (7, "image-calculus"),
    (8, "determinism"),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    pub traces: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

/// One case's failure messages; empty means the case passed.
type CaseOutcome = Vec<String>;

fn outcome(label: String, r: Result<CaseOutcome>) -> CaseOutcome {
    match r {
        Ok(v) => v.into_iter().map(|m| format!("{label}: {m}")).collect(),
        Err(e) => vec![format!("{label}: {e}")],
    }
}

fn report(id: u32, outcomes: Vec<CaseOutcome>) -> CriterionReport {
    let name = CRITERIA.iter().find(|(i, _)| *i == id).map(|(_, n)| n.to_string()).unwrap_or_default();
    let failures = outcomes.iter().filter(|o| !o.is_empty()).count();
    let traces = outcomes.into_iter().flatten().take(TRACE_LIMIT).collect();
    CriterionReport { id, name, passed: failures == 0, cases: 0, failures, traces }
}

fn cases<T: Sync>(id: u32, items: &[T], label: impl Fn(usize) -> String + Sync, f: impl Fn(&T) -> Result<CaseOutcome> + Sync + Send) -> CriterionReport {
    let indexed: Vec<(usize, &T)> = items.iter().enumerate().collect();
    let outcomes = par::map(&indexed, |(i, t)| outcome(label(*i), f(t)));
    let mut r = report(id, outcomes);
    r.cases = items.len();
    r
}

fn merge(id: u32, parts: Vec<CriterionReport>) -> CriterionReport {
    let mut traces: Vec<String> = parts.iter().flat_map(|p| p.traces.clone()).collect();
    traces.truncate(TRACE_LIMIT);
    let failures = parts.iter().map(|p| p.failures).sum();
    let cases = parts.iter().map(|p| p.cases).sum();
    let name = CRITERIA.iter().find(|(i, _)| *i == id).map(|(_, n)| n.to_string()).unwrap_or_default();
    CriterionReport { id, name, passed: failures == 0, cases, failures, traces }
}

fn check(fails: &mut CaseOutcome, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        fails.push(msg());
    }
}

/// Sampled points per polyhedron and the stride of segment checks among them.
const SWEEP_LIMIT: usize = 24;
const SEGMENT_STRIDE: usize = 3;

fn polyhedra(seed: u64, stream: &str, count: usize, max_dim: usize) -> Vec<HPolyhedron> {
    (0..count).map(|i| generate::random_polyhedron(&mut generate::rng(stream_seed(seed, stream, i)), max_dim)).collect()
}

fn interior_equivalence(seed: u64) -> CriterionReport {
    let sets = polyhedra(seed, "c1", 300, 4);
    cases(1, &sets, |i| format!("polyhedron {i}"), |p| {
        let mut fails = Vec::new();
        let anchor = crate::calculus::relative_interior_point(p)?;
        let mut inside = spread(sweep_points(p), SWEEP_LIMIT);
        if !inside.contains(&anchor) {
            inside.push(anchor.clone());
        }
        for (k, x) in inside.iter().enumerate() {
            let ri = ri_member(p, x)?;
            let iri = iri_member(p, x)?;
            let absorbing = relatively_absorbing(p, x)?;
            let qri = qri_member(p, x)?;
            let nonsupport = nonsupport_point(p, x)?;
            check(&mut fails, ri == iri && iri == absorbing && absorbing == qri && qri == nonsupport, || {
                format!("at {}: ri {ri} iri {iri} absorbing {absorbing} qri {qri} nonsupport {nonsupport}", format_vec(x))
            });
            for kind in InteriorKind::ALL.into_iter().filter(|_| k % SEGMENT_STRIDE == 0) {
                let ok = segment_check(p, kind, &anchor, x, &default_segment_samples())?;
                check(&mut fails, ok, || format!("segment from {} fails for {}", format_vec(x), kind.name()));
            }
        }
        for x in generate::exterior_points(p, &anchor) {
            for kind in InteriorKind::ALL {
                check(&mut fails, !kind.member(p, &x)?, || format!("exterior {} accepted by {}", format_vec(&x), kind.name()));
            }
            check(&mut fails, matches!(relatively_absorbing(p, &x), Err(Error::NotMember)), || {
                format!("exterior {} not rejected by the absorbing route", format_vec(&x))
            });
        }
        Ok(fails)
    })
}

fn polar_identities(seed: u64) -> CriterionReport {
    let cones: Vec<_> =
        (0..100).map(|i| generate::random_cone(&mut generate::rng(stream_seed(seed, "c2-cone", i)), 4)).collect();
    let bipolar = cases(2, &cones, |i| format!("cone {i}"), |c| {
        let back = polar(&polar(c));
        Ok(if back.set_equal(c) { vec![] } else { vec!["bipolar differs from the cone".into()] })
    });
    let sets = polyhedra(seed, "c2-set", 100, 4);
    let normals = cases(2, &sets, |i| format!("polyhedron {i}"), |p| {
        let mut fails = Vec::new();
        for x in sweep_points(p) {
            let n = normal_cone(p, &x)?;
            let dual = polar(&difference_cone(p, &x)?);
            check(&mut fails, n.set_equal(&dual), || format!("normal cone differs from polar at {}", format_vec(&x)));
        }
        Ok(fails)
    });
    merge(2, vec![bipolar, normals])
}

fn separation_biconditional(seed: u64) -> CriterionReport {
    let sets = polyhedra(seed, "c3-point", 100, 4);
    let points = cases(3, &sets, |i| format!("polyhedron {i}"), |p| {
        let mut fails = Vec::new();
        let sweep = sweep_points(p);
        for x in sweep.iter().take(3) {
            let cert = properly_separate_point(p, x)?;
            let qri = qri_member(p, x)?;
            check(&mut fails, cert.is_some() == !qri, || format!("certificate {} but qri {qri} at {}", cert.is_some(), format_vec(x)));
            if let Some(c) = cert {
                let single = HPolyhedron::point(x);
                for k in [int(1), int(2), frac(1, 3)] {
                    if let Err(e) = c.scaled(&k).verify(p, &single) {
                        fails.push(format!("certificate at {} scaled by {k} fails: {e}", format_vec(x)));
                    }
                }
            }
        }
        Ok(fails)
    });
    let modes = [Overlap::Qualified, Overlap::Disjoint, Overlap::Touching, Overlap::Random, Overlap::Touching];
    let pairs: Vec<(Overlap, HPolyhedron, HPolyhedron)> = (0..150)
        .map(|i| {
            let mut r = generate::rng(stream_seed(seed, "c3-pair", i));
            let mode = modes[i % modes.len()];
            let dim = 1 + i % 3;
            let (p, q) = generate::random_domain_pair(&mut r, dim, mode);
            (mode, p, q)
        })
        .collect();
    let touching = pairs.iter().filter(|(m, _, _)| *m == Overlap::Touching).count();
    let mut sets_part = cases(3, &pairs, |i| format!("pair {i}"), |(mode, p, q)| {
        let mut fails = Vec::new();
        let cert = properly_separate_sets(p, q)?;
        let meet = ri_intersect(p, q)?;
        check(&mut fails, cert.is_some() == !meet, || format!("{mode:?}: certificate {} but ri meet {meet}", cert.is_some()));
        if *mode == Overlap::Touching || *mode == Overlap::Disjoint {
            check(&mut fails, !meet, || format!("{mode:?} pair has meeting relative interiors"));
        }
        if let Some(c) = cert {
            if let Err(e) = c.verify(p, q) {
                fails.push(format!("certificate fails to replay: {e}"));
            }
        }
        Ok(fails)
    });
    if touching < 20 {
        sets_part.failures += 1;
        sets_part.passed = false;
        sets_part.traces.push(format!("only {touching} touching pairs"));
    }
    merge(3, vec![points, sets_part])
}

/// `|x|` and `−|x − 1|`.
pub fn abs_pair() -> (PLConvexFunction, PLConcaveFunction) {
    let f = PLConvexFunction::new(
        1,
        vec![AffinePiece::new(vec_from(&[1]), int(0)), AffinePiece::new(vec_from(&[-1]), int(0))],
        HPolyhedron::universe(1),
    )
    .expect("valid");
    let g = PLConcaveFunction::new(
        1,
        vec![AffinePiece::new(vec_from(&[1]), int(-1)), AffinePiece::new(vec_from(&[-1]), int(1))],
        HPolyhedron::universe(1),
    )
    .expect("valid");
    (f, g)
}

fn fenchel_rockafellar(seed: u64) -> CriterionReport {
    let modes = [Overlap::Random, Overlap::Qualified, Overlap::Touching, Overlap::Disjoint];
    let weak: Vec<(usize, Overlap)> = (0..1000).map(|i| (i, modes[i % modes.len()])).collect();
    let weak_part = cases(4, &weak, |i| format!("weak pair {i}"), |(i, mode)| {
        let mut r = generate::rng(stream_seed(seed, "c4-weak", *i));
        let (f, g) = generate::random_pl_pair(&mut r, 1 + i % 3, *mode);
        let (p, d) = duality_values(&f, &g)?;
        Ok(if p.value >= d.value { vec![] } else { vec![format!("primal {} < dual {}", p.value, d.value)] })
    });
    let strong: Vec<usize> = (0..200).collect();
    let strong_part = cases(4, &strong, |i| format!("qualified pair {i}"), |i| {
        let mut r = generate::rng(stream_seed(seed, "c4-strong", *i));
        let (f, g) = generate::random_pl_pair(&mut r, 1 + i % 3, Overlap::Qualified);
        let mut fails = Vec::new();
        let rep = verify_fenchel_rockafellar(&f, &g)?;
        let q = &rep.qualification;
        check(&mut fails, q.qual_qri && q.qual_ri && q.qual_quasi_regular.all(), || format!("qualification flags {q:?}"));
        check(&mut fails, !q.qual_ri || q.qual_qri, || "ri qualification without qri qualification".into());
        check(&mut fails, rep.primal_value == rep.dual_value, || {
            format!("primal {} dual {}", rep.primal_value, rep.dual_value)
        });
        if let ExtRat::Finite(alpha) = &rep.primal_value {
            check(&mut fails, rep.gap == Some(Rat::from_integer(0.into())), || format!("gap {:?}", rep.gap));
            let cert = extract_dual_certificate(&f, &g, alpha)?;
            let achieved = cert.g_star_value.sub(&cert.f_star_value)?;
            check(&mut fails, achieved >= ExtRat::Finite(alpha.clone()), || format!("certificate reaches {achieved}"));
        }
        Ok(fails)
    });
    let closed = {
        let mut fails = Vec::new();
        let (f, g) = abs_pair();
        let run = || -> Result<CaseOutcome> {
            let mut fails = Vec::new();
            let rep = verify_fenchel_rockafellar(&f, &g)?;
            let one = ExtRat::Finite(int(1));
            check(&mut fails, rep.primal_value == one && rep.dual_value == one, || {
                format!("closed form: primal {} dual {}", rep.primal_value, rep.dual_value)
            });
            let cert = extract_dual_certificate(&f, &g, &int(1))?;
            check(&mut fails, cert.x_star == vec_from(&[1]), || format!("closed form: x* = {}", format_vec(&cert.x_star)));
            check(&mut fails, cert.g_star_value.sub(&cert.f_star_value)? >= one, || "closed form certificate below 1".into());
            Ok(fails)
        };
        fails.extend(outcome("closed form".into(), run()));
        let mut r = report(4, vec![fails]);
        r.cases = 1;
        r
    };
    merge(4, vec![weak_part, strong_part, closed])
}

fn sequence_examples(seed: u64) -> CriterionReport {
    let fixed = {
        let run = || -> Result<CaseOutcome> {
            let mut fails = Vec::new();
            let e1 = TailSequence::unit(1);
            let halves = TailSequence::geometric(vec![], frac(1, 2), frac(1, 2))?;
            check(&mut fails, !ell1ball_qri(&e1), || "e1 in qri".into());
            check(&mut fails, halves.norm1() == int(1) && ell1ball_qri(&halves), || "2^-k not in qri".into());
            check(&mut fails, ell1ball_normal_test(&e1, &e1)?, || "e1 not normal at e1".into());
            check(&mut fails, !ell1ball_normal_test(&e1, &e1.neg())?, || "-e1 normal at e1".into());
            Ok(fails)
        };
        let mut r = report(5, vec![outcome("fixed points".into(), run())]);
        r.cases = 1;
        r
    };
    let members: Vec<usize> = (0..500).collect();
    let ell1 = cases(5, &members, |i| format!("sequence {i}"), |i| {
        let x = generate::random_ell1_member(&mut generate::rng(stream_seed(seed, "c5-ell1", *i)));
        let mut fails = Vec::new();
        check(&mut fails, !ell1ball_iri(&x) || ell1ball_qri(&x), || "iri point outside qri".into());
        if let Some(z) = x.sign_vector().filter(|_| x.norm1() == int(1)) {
            check(&mut fails, ell1ball_normal_test(&x, &z)?, || "sign vector not normal".into());
            check(&mut fails, !ell1ball_normal_test(&x, &z.neg())?, || "negated sign vector normal".into());
            check(&mut fails, !ell1ball_qri(&x), || "finite-support sphere point in qri".into());
        }
        Ok(fails)
    });
    let candidates: Vec<usize> = (0..50).collect();
    let refute = cases(5, &candidates, |i| format!("candidate {i}"), |i| {
        let x = generate::random_nonneg_candidate(&mut generate::rng(stream_seed(seed, "c5-nonneg", *i)));
        match nonneg_ball_iri_refutation(&x, &default_epsilon()) {
            Err(Error::PreconditionFailed(_)) => Ok(vec![]),
            Err(e) => Err(e),
            Ok(r) => {
                let mut fails = Vec::new();
                for alpha in [frac(1001, 1000), frac(3, 2), int(2), int(17)] {
                    let w = r.witness(&alpha)?;
                    check(&mut fails, w.value < int(0), || format!("non-negative coordinate at alpha {alpha}"));
                }
                Ok(fails)
            }
        }
    });
    merge(5, vec![fixed, ell1, refute])
}

/// The quadrant and lexicographic analyses on the canonical grid against the
/// closed forms `iri = R × int C` and `iri = R × {u > 0}`.
fn ordered_epigraph_examples() -> Result<CaseOutcome> {
    let mut fails = Vec::new();
    let grid = canonical_lex_grid();
    let zero = Rat::from_integer(0.into());
    let quad = check_iri_c_epi(&PLVectorFunction::zero(1, 2), &OrderingCone::nonnegative_orthant(2), &grid)?;
    for s in &quad.samples {
        let (u, v) = (&s.point[1], &s.point[2]);
        let in_c = *u >= zero && *v >= zero;
        check(&mut fails, s.in_iri == (*u > zero && *v > zero), || format!("quadrant iri at {}", format_vec(&s.point)));
        check(&mut fails, s.in_rhs == (in_c && !(u == &zero && v == &zero)), || format!("quadrant rhs at {}", format_vec(&s.point)));
    }
    check(&mut fails, quad.holds && !quad.strict_witnesses.is_empty(), || "quadrant strictness not exhibited".into());
    let lex = lex_epi_analysis(&grid)?;
    for s in &lex.samples {
        let u = &s.point[1];
        check(&mut fails, s.in_iri == (*u > zero), || format!("lex iri at {}", format_vec(&s.point)));
    }
    let expected: Matrix = grid.iter().filter(|p| p[1] == zero && p[2] > zero).cloned().collect();
    check(&mut fails, lex.strict_witnesses == expected, || "lex witnesses differ from {(x, 0, v) : v > 0}".into());
    Ok(fails)
}

fn graphs_and_orders(seed: u64) -> CriterionReport {
    let maps: Vec<_> = (0..50).map(|i| generate::random_map(&mut generate::rng(stream_seed(seed, "c6-map", i)))).collect();
    let inclusions = cases(6, &maps, |i| format!("map {i}"), |m| {
        let samples = default_samples(m.graph(), DEFAULT_SEED);
        let mut fails = Vec::new();
        let q = check_graph_qri_inclusion(m, &samples)?;
        check(&mut fails, q.holds, || format!("qri inclusion fails at {:?}", q.violation.as_deref().map(format_vec)));
        let r = check_graph_iri_inclusion(m, &samples)?;
        check(&mut fails, r.holds, || format!("iri inclusion fails at {:?}", r.violation.as_deref().map(format_vec)));
        Ok(fails)
    });
    let epis: Vec<_> =
        (0..50).map(|i| generate::random_epigraph_map(&mut generate::rng(stream_seed(seed, "c6-epi", i)))).collect();
    let equalities = cases(6, &epis, |i| format!("epigraph map {i}"), |m| {
        let samples = default_samples(m.graph(), DEFAULT_SEED);
        let mut fails = Vec::new();
        let q = check_graph_qri_inclusion(m, &samples)?;
        check(&mut fails, q.holds, || "qri inclusion fails".into());
        let e = check_graph_equality(m, &samples)?;
        check(&mut fails, e.holds && e.domain_quasi_regular, || "graph equality fails".into());
        Ok(fails)
    });
    let example = {
        let mut r = report(6, vec![outcome("ordered epigraphs".into(), ordered_epigraph_examples())]);
        r.cases = 1;
        r
    };
    merge(6, vec![inclusions, equalities, example])
}

fn image_calculus(seed: u64) -> CriterionReport {
    let idx: Vec<usize> = (0..100).collect();
    cases(7, &idx, |i| format!("image {i}"), |i| {
        let mut r = generate::rng(stream_seed(seed, "c7", *i));
        let p = generate::random_polyhedron(&mut r, 3);
        let rows = 1 + i % 3;
        let m = generate::random_matrix(&mut r, rows, p.dim());
        let samples = default_samples(&p, DEFAULT_SEED);
        let mut fails = Vec::new();
        for (kind, check_fn) in [
            (InteriorKind::Iri, check_image_iri as fn(&Matrix, &HPolyhedron, &[Vector]) -> Result<_>),
            (InteriorKind::Qri, check_image_qri),
        ] {
            let c = check_fn(&m, &p, &samples)?;
            check(&mut fails, c.holds, || format!("{} image equality fails", kind.name()));
            for pre in &c.preimages {
                let ok = mat_vec(&m, &pre.x) == pre.y && kind.member(&p, &pre.x)?;
                check(&mut fails, ok, || format!("preimage of {} does not re-verify", format_vec(&pre.y)));
            }
        }
        Ok(fails)
    })
}

/// Runs one criterion; `8` reruns criteria 1 to 7 twice and compares bytes.
pub fn run_criterion(id: u32, seed: u64) -> Result<CriterionReport> {
    Ok(match id {
        1 => interior_equivalence(seed),
        2 => polar_identities(seed),
        3 => separation_biconditional(seed),
        4 => fenchel_rockafellar(seed),
        5 => sequence_examples(seed),
        6 => graphs_and_orders(seed),
        7 => image_calculus(seed),
        8 => {
            let first = serde_json::to_vec(&core_reports(seed)).expect("serializable");
            let second = serde_json::to_vec(&core_reports(seed)).expect("serializable");
            determinism_report(first == second, 2)
        }
        other => return Err(Error::Parse(format!("unknown criterion {other}"))),
    })
}

fn core_reports(seed: u64) -> Vec<CriterionReport> {
    (1..=7).map(|id| run_criterion(id, seed).expect("known id")).collect()
}

/// Report for the determinism criterion from a byte comparison of `runs` runs.
pub fn determinism_report(identical: bool, runs: usize) -> CriterionReport {
    CriterionReport {
        id: 8,
        name: "determinism".into(),
        passed: identical,
        cases: runs,
        failures: usize::from(!identical),
        traces: if identical { vec![] } else { vec!["reports differ between runs".into()] },
    }
}

/// Criterion ids whose name or number matches `filter`.
pub fn select(filter: Option<&str>) -> Vec<u32> {
    CRITERIA
        .iter()
        .filter(|(id, name)| filter.is_none_or(|f| name.contains(f) || id.to_string() == f))
        .map(|(id, _)| *id)
        .collect()
}

/// Runs the selected criteria. When the determinism criterion is selected
/// together with others, the others are run a second time and compared.
pub fn run_suite(seed: u64, filter: Option<&str>) -> Result<SuiteReport> {
    let ids = select(filter);
    if ids.is_empty() {
        return Err(Error::Parse(format!("no criterion matches {:?}", filter.unwrap_or_default())));
    }
    let core: Vec<u32> = ids.iter().copied().filter(|&id| id != 8).collect();
    let mut criteria: Vec<CriterionReport> =
        core.iter().map(|&id| run_criterion(id, seed)).collect::<Result<_>>()?;
    if ids.contains(&8) {
        if core.is_empty() {
            criteria.push(run_criterion(8, seed)?);
        } else {
            let again: Vec<CriterionReport> =
                core.iter().map(|&id| run_criterion(id, seed)).collect::<Result<_>>()?;
            let same = serde_json::to_vec(&again).expect("serializable") == serde_json::to_vec(&criteria).expect("serializable");
            criteria.push(determinism_report(same, 2));
        }
    }
    Ok(SuiteReport { seed, passed: criteria.iter().all(|c| c.passed), criteria })
}
