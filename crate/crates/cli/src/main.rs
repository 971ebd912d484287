use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use relint::calculus::{default_samples, DEFAULT_SEED};
use relint::duality::{extract_dual_certificate, verify_fenchel_rockafellar};
use relint::functions::{concave_conjugate, conjugate, ExtRat, PLConcaveFunction, PLConvexFunction};
use relint::generate::{instance_bundle, Overlap};
use relint::graphs_orders::{
    check_graph_equality, check_graph_iri_inclusion, check_graph_qri_inclusion, PolySetValuedMap,
};
use relint::interiors::{normal_cone, polar, InteriorKind};
use relint::rat::{parse, parse_point};
use relint::separation::{properly_separate_point, properly_separate_sets, SeparationCertificate};
use relint::seqlab::{
    default_epsilon, ell1ball_iri, ell1ball_normal_test, ell1ball_qri, nonneg_ball_iri_refutation, TailSequence,
};
use relint::sets::{HPolyhedron, PolyCone};
use relint::suite::run_suite;
use relint::{Error, Rat};

/// Exact interior, separation and duality oracles for rational polyhedra.
///
/// Exit codes: 0 verified, 1 property violated, 2 input error.
#[derive(Parser)]
#[command(name = "relint", version)]
struct Cli {
    /// Also write the JSON document to `<dir>/<command>.json`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relative interior membership.
    Ri { set: PathBuf, point: String },
    /// Intrinsic relative interior membership.
    Iri { set: PathBuf, point: String },
    /// Quasi-relative interior membership.
    Qri { set: PathBuf, point: String },
    /// Normal cone of a set at a point, as generators.
    NormalCone { set: PathBuf, point: String },
    /// Polar of a cone given by generators.
    Polar { cone: PathBuf },
    /// Proper separation of two sets, or of a set and a point.
    Separate {
        a: PathBuf,
        b: Option<PathBuf>,
        #[arg(long, conflicts_with = "b")]
        point: Option<String>,
    },
    /// Replay a separation certificate against its two sets.
    VerifyCertificate { certificate: PathBuf, a: PathBuf, b: PathBuf },
    /// Conjugate of a convex or concave piecewise-linear function.
    Conjugate { function: PathBuf },
    /// Primal and dual values with qualification flags for a pair `{"f", "g"}`.
    Duality { pair: PathBuf },
    /// Dual certificate attaining the primal value.
    CertifyDuality { pair: PathBuf },
    /// Graph interior inclusions and equality for a set-valued map.
    GraphCheck { map: PathBuf },
    /// Sequence-space examples.
    Seqlab {
        #[command(subcommand)]
        case: SeqCase,
    },
    /// Reproducible random instances.
    Gen {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value = "random")]
        overlap: Overlap,
    },
    /// Acceptance property suite.
    Suite {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Criterion number or a substring of its name.
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Subcommand)]
enum SeqCase {
    /// Intrinsic relative interior of the unit ball of ℓ¹.
    Ell1Iri { sequence: PathBuf },
    /// Quasi-relative interior of the unit ball of ℓ¹.
    Ell1Qri { sequence: PathBuf },
    /// Whether `z` is normal to the ℓ¹ ball at `x`.
    Ell1Normal { sequence: PathBuf, normal: PathBuf },
    /// Refute intrinsic relative interior membership in the nonnegative part
    /// of the ℓ² ball by exhibiting a negative coordinate.
    Refute {
        sequence: PathBuf,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long, default_value = "1001/1000")]
        alpha: String,
    },
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    doc: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::OracleDisagreement(_) => (1, "oracle-disagreement"),
            Error::QualificationFailure(_) => (1, "qualification-failure"),
            Error::DimensionMismatch { .. } => (2, "dimension-mismatch"),
            Error::DeskScaleLimit(_) => (2, "desk-scale-limit"),
            Error::EmptySet => (2, "empty-set"),
            Error::NotMember => (2, "not-member"),
            Error::PreconditionFailed(_) => (2, "precondition-failed"),
            Error::IndeterminateForm(_) => (2, "indeterminate-form"),
            Error::Parse(_) => (2, "parse"),
        };
        Failure { code, doc: json!({"error": kind, "message": e.to_string()}) }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 2, doc: json!({"error": "input", "message": message}) }
}

type Outcome = Result<(Value, bool), Failure>;

fn read<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn point(s: &str) -> Result<Vec<Rat>, Failure> {
    Ok(parse_point(s)?)
}

fn membership(kind: InteriorKind, set: &Path, x: &str) -> Outcome {
    let p: HPolyhedron = read(set)?;
    let x = point(x)?;
    let member = kind.member(&p, &x)?;
    let active = if p.contains(&x) { p.active_rows(&x) } else { vec![] };
    let implicit: Vec<usize> =
        p.implicit_rows().iter().enumerate().filter(|(_, &imp)| imp).map(|(i, _)| i).collect();
    Ok((json!({"kind": kind.name(), "member": member, "active_rows": active, "implicit_rows": implicit}), true))
}

fn separate(a: &Path, b: Option<&Path>, pt: Option<&str>) -> Outcome {
    let p: HPolyhedron = read(a)?;
    let (q, cert) = match (b, pt) {
        (Some(b), None) => {
            let q: HPolyhedron = read(b)?;
            let cert = properly_separate_sets(&p, &q)?;
            (q, cert)
        }
        (None, Some(s)) => {
            let x = point(s)?;
            let cert = properly_separate_point(&p, &x)?;
            (HPolyhedron::point(&x), cert)
        }
        _ => return Err(input_error("give a second set or --point".into())),
    };
    match cert {
        None => Ok((json!({"separable": false}), true)),
        Some(c) => {
            let replay = c.verify(&p, &q);
            let doc = json!({"separable": true, "certificate": to_value(&c), "replayed": replay.is_ok()});
            Ok((doc, replay.is_ok()))
        }
    }
}

fn verify_certificate(cert: &Path, a: &Path, b: &Path) -> Outcome {
    let c: SeparationCertificate = read(cert)?;
    let p: HPolyhedron = read(a)?;
    let q: HPolyhedron = read(b)?;
    Ok(match c.verify(&p, &q) {
        Ok(()) => (json!({"valid": true}), true),
        Err(Error::PreconditionFailed(reason)) => (json!({"valid": false, "reason": reason}), false),
        Err(e) => return Err(e.into()),
    })
}

fn conjugate_of(path: &Path) -> Outcome {
    let raw: Value = read(path)?;
    let concave = raw.get("kind").and_then(Value::as_str) == Some("concave");
    let dual = if concave {
        let g: PLConcaveFunction = serde_json::from_value(raw).map_err(|e| input_error(e.to_string()))?;
        concave_conjugate(&g)
    } else {
        let f: PLConvexFunction = serde_json::from_value(raw).map_err(|e| input_error(e.to_string()))?;
        conjugate(&f)
    };
    Ok((to_value(&dual), true))
}

#[derive(Deserialize)]
struct Pair {
    f: PLConvexFunction,
    g: PLConcaveFunction,
}

fn duality(path: &Path) -> Outcome {
    let pair: Pair = read(path)?;
    let report = verify_fenchel_rockafellar(&pair.f, &pair.g)?;
    let ok = report.weak_duality && (!report.qualification.qual_qri || report.gap.as_ref().is_some_and(|g| g == &Rat::from_integer(0.into())));
    Ok((to_value(&report), ok))
}

fn certify_duality(path: &Path) -> Outcome {
    let pair: Pair = read(path)?;
    let report = verify_fenchel_rockafellar(&pair.f, &pair.g)?;
    let ExtRat::Finite(alpha) = &report.primal_value else {
        return Err(Error::PreconditionFailed(format!("primal value {} is not finite", report.primal_value)).into());
    };
    let cert = extract_dual_certificate(&pair.f, &pair.g, alpha)?;
    Ok((to_value(&cert), true))
}

fn graph_check(path: &Path) -> Outcome {
    let map: PolySetValuedMap = read(path)?;
    let samples = default_samples(map.graph(), DEFAULT_SEED);
    let qri = check_graph_qri_inclusion(&map, &samples)?;
    let iri = check_graph_iri_inclusion(&map, &samples)?;
    let mut ok = qri.holds && iri.holds;
    let equality = match check_graph_equality(&map, &samples) {
        Ok(e) => {
            ok &= e.holds;
            to_value(&e)
        }
        Err(Error::PreconditionFailed(reason)) => json!({"skipped": reason}),
        Err(e) => return Err(e.into()),
    };
    Ok((json!({"qri_inclusion": to_value(&qri), "iri_inclusion": to_value(&iri), "equality": equality}), ok))
}

fn seqlab(case: &SeqCase) -> Outcome {
    match case {
        SeqCase::Ell1Iri { sequence } => {
            let x: TailSequence = read(sequence)?;
            Ok((json!({"member": ell1ball_iri(&x)}), true))
        }
        SeqCase::Ell1Qri { sequence } => {
            let x: TailSequence = read(sequence)?;
            Ok((json!({"member": ell1ball_qri(&x)}), true))
        }
        SeqCase::Ell1Normal { sequence, normal } => {
            let x: TailSequence = read(sequence)?;
            let z: TailSequence = read(normal)?;
            Ok((json!({"normal": ell1ball_normal_test(&x, &z)?}), true))
        }
        SeqCase::Refute { sequence, epsilon, alpha } => {
            let x: TailSequence = read(sequence)?;
            let eps = epsilon.as_deref().map(parse).transpose()?.unwrap_or_else(default_epsilon);
            let alpha = parse(alpha)?;
            let refutation = nonneg_ball_iri_refutation(&x, &eps)?;
            let witness = refutation.witness(&alpha)?;
            let ok = witness.value < Rat::from_integer(0.into());
            Ok((json!({"refutation": to_value(&refutation), "witness": to_value(&witness)}), ok))
        }
    }
}

fn run(command: &Command) -> Outcome {
    match command {
        Command::Ri { set, point } => membership(InteriorKind::Ri, set, point),
        Command::Iri { set, point } => membership(InteriorKind::Iri, set, point),
        Command::Qri { set, point } => membership(InteriorKind::Qri, set, point),
        Command::NormalCone { set, point: x } => {
            let p: HPolyhedron = read(set)?;
            Ok((to_value(&normal_cone(&p, &point(x)?)?), true))
        }
        Command::Polar { cone } => {
            let c: PolyCone = read(cone)?;
            Ok((to_value(&polar(&c)), true))
        }
        Command::Separate { a, b, point } => separate(a, b.as_deref(), point.as_deref()),
        Command::VerifyCertificate { certificate, a, b } => verify_certificate(certificate, a, b),
        Command::Conjugate { function } => conjugate_of(function),
        Command::Duality { pair } => duality(pair),
        Command::CertifyDuality { pair } => certify_duality(pair),
        Command::GraphCheck { map } => graph_check(map),
        Command::Seqlab { case } => seqlab(case),
        Command::Gen { seed, count, dim, overlap } => {
            if !(1..=4).contains(dim) {
                return Err(input_error(format!("dim {dim} outside 1..=4")));
            }
            Ok((to_value(&instance_bundle(*seed, *count, *dim, *overlap)), true))
        }
        Command::Suite { seed, filter } => {
            let report = run_suite(*seed, filter.as_deref())?;
            Ok((to_value(&report), report.passed))
        }
    }
}

fn name(command: &Command) -> &'static str {
    match command {
        Command::Ri { .. } => "ri",
        Command::Iri { .. } => "iri",
        Command::Qri { .. } => "qri",
        Command::NormalCone { .. } => "normal-cone",
        Command::Polar { .. } => "polar",
        Command::Separate { .. } => "separate",
        Command::VerifyCertificate { .. } => "verify-certificate",
        Command::Conjugate { .. } => "conjugate",
        Command::Duality { .. } => "duality",
        Command::CertifyDuality { .. } => "certify-duality",
        Command::GraphCheck { .. } => "graph-check",
        Command::Seqlab { .. } => "seqlab",
        Command::Gen { .. } => "gen",
        Command::Suite { .. } => "suite",
    }
}

#[cfg(feature = "parallel")]
fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("RELINT_THREADS") else {
        return Ok(());
    };
    let n: usize = value.parse().map_err(|_| input_error(format!("RELINT_THREADS={value:?} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| input_error(format!("thread pool: {e}")))
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> Result<(), Failure> {
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (doc, code) = match configure_threads().and_then(|()| run(&cli.command)) {
        Ok((doc, verified)) => (doc, if verified { 0 } else { 1 }),
        Err(f) => (f.doc, f.code),
    };
    let text = serde_json::to_string_pretty(&doc).expect("serializable");
    println!("{text}");
    if let Some(dir) = &cli.output {
        let path = dir.join(format!("{}.json", name(&cli.command)));
        if let Err(e) = fs::create_dir_all(dir).and_then(|()| fs::write(&path, format!("{text}\n"))) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
