use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn relint(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_relint")).args(args).output().expect("runs");
    let doc = serde_json::from_slice(&out.stdout).expect("JSON on stdout");
    (out.status.code().expect("exit code"), doc)
}

#[test]
fn qri_of_square_center() {
    let (code, doc) = relint(&["qri", &data("square.json"), "1/2,1/2"]);
    assert_eq!(code, 0);
    assert_eq!(doc["member"], true);
}

#[test]
fn corner_is_in_no_interior() {
    for kind in ["ri", "iri", "qri"] {
        let (code, doc) = relint(&[kind, &data("square.json"), "0,0"]);
        assert_eq!(code, 0);
        assert_eq!(doc["member"], false);
        assert_eq!(doc["active_rows"], serde_json::json!([1, 3]));
    }
}

#[test]
fn normal_cone_at_corner_and_polar() {
    let (code, doc) = relint(&["normal-cone", &data("square.json"), "1,1"]);
    assert_eq!(code, 0);
    assert_eq!(doc["generators"].as_array().unwrap().len(), 2);
    let (code, doc) = relint(&["polar", &data("quadrant.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["dim"], 2);
}

#[test]
fn absolute_value_pair() {
    let (code, doc) = relint(&["duality", &data("pair_abs.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["primal_value"], "1");
    assert_eq!(doc["dual_value"], "1");
    assert_eq!(doc["gap"], "0");
    let (code, doc) = relint(&["certify-duality", &data("pair_abs.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["x_star"], serde_json::json!(["1"]));
}

#[test]
fn conjugate_of_absolute_value_is_indicator() {
    let (code, doc) = relint(&["conjugate", &data("abs.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["kind"], "convex");
}

#[test]
fn separation_certificate_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_string_lossy().into_owned();
    let (code, doc) = relint(&["--output", &out, "separate", &data("square.json"), &data("right_square.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["separable"], true);
    assert_eq!(doc["replayed"], true);
    let cert = dir.path().join("certificate.json");
    std::fs::write(&cert, doc["certificate"].to_string()).unwrap();
    let cert = cert.to_string_lossy().into_owned();
    let (code, doc) = relint(&["verify-certificate", &cert, &data("square.json"), &data("right_square.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["valid"], true);
    assert!(dir.path().join("separate.json").exists());
    let (code, doc) = relint(&["verify-certificate", &cert, &data("square.json"), &data("inner_square.json")]);
    assert_eq!(code, 1);
    assert_eq!(doc["valid"], false);
}

#[test]
fn overlapping_squares_are_not_separable() {
    let (code, doc) = relint(&["separate", &data("square.json"), &data("inner_square.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["separable"], false);
    let (code, doc) = relint(&["separate", &data("square.json"), "--point", "1,1/2"]);
    assert_eq!(code, 0);
    assert_eq!(doc["separable"], true);
}

#[test]
fn graph_check_on_band() {
    let (code, doc) = relint(&["graph-check", &data("band_map.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["qri_inclusion"]["holds"], true);
    assert_eq!(doc["equality"]["holds"], true);
}

#[test]
fn sequence_cases() {
    let (code, doc) = relint(&["seqlab", "ell1-qri", &data("e1.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["member"], false);
    let (_, doc) = relint(&["seqlab", "ell1-qri", &data("halves.json")]);
    assert_eq!(doc["member"], true);
    let (_, doc) = relint(&["seqlab", "ell1-normal", &data("e1.json"), &data("e1.json")]);
    assert_eq!(doc["normal"], true);
    let (code, doc) = relint(&["seqlab", "refute", &data("positive.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["witness"]["n"], 10);
}

#[test]
fn generator_is_deterministic() {
    let args = ["gen", "--seed", "1", "--count", "1", "--dim", "2"];
    let a = Command::new(env!("CARGO_BIN_EXE_relint")).args(args).output().unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_relint")).args(args).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn disjoint_pairs_are_unqualified() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_relint"))
        .args(["gen", "--seed", "3", "--count", "3", "--dim", "2", "--overlap", "disjoint"])
        .output()
        .unwrap();
    let bundle: Value = serde_json::from_slice(&out.stdout).unwrap();
    for (i, pair) in bundle["pairs"].as_array().unwrap().iter().enumerate() {
        let path = dir.path().join(format!("pair{i}.json"));
        std::fs::write(&path, pair.to_string()).unwrap();
        let (code, doc) = relint(&["duality", &path.to_string_lossy()]);
        assert_eq!(code, 0);
        assert_eq!(doc["qual_qri"], false);
    }
}

#[test]
fn input_errors_exit_two() {
    let (code, doc) = relint(&["qri", &data("malformed.json"), "0,0"]);
    assert_eq!(code, 2);
    assert!(doc["message"].as_str().unwrap().contains("line"));
    let (code, _) = relint(&["qri", &data("square.json"), "1,2,3"]);
    assert_eq!(code, 2);
    let (code, _) = relint(&["qri", &data("square.json"), "a/b"]);
    assert_eq!(code, 2);
    let (code, _) = relint(&["gen", "--dim", "9"]);
    assert_eq!(code, 2);
}

#[test]
fn suite_single_criterion() {
    let (code, doc) = relint(&["suite", "--filter", "sequence"]);
    assert_eq!(code, 0);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["criteria"].as_array().unwrap().len(), 1);
}
