use std::path::PathBuf;
use std::process::{Command, Output};

use mdqec::channel::KrausMap;
use mdqec::fixtures::{block_shift_channel, block_unitary_channel, corner_leak_channel, two_block_channel};
use mdqec::numerics::{c64, max_abs, ComplexMatrix};
use serde_json::Value;

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    path.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdqec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let code = out.status.code().expect("exit code");
    let value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, value)
}

fn as_f64(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn read_kraus(name: &str) -> KrausMap {
    let file: Value = serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
    let ops = file["kraus"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| {
            let rows = k.as_array().unwrap();
            ComplexMatrix::from_fn(rows.len(), rows.len(), |i, j| {
                let z = &rows[i][j];
                c64(as_f64(&z[0]), as_f64(&z[1]))
            })
        })
        .collect();
    KrausMap::new(ops).unwrap()
}

fn hadamard() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_row_slice(2, 2, &[c64(s, 0.0), c64(s, 0.0), c64(s, 0.0), c64(-s, 0.0)])
}

fn phase() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 1.0)])
}

fn flip() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])
}

#[test]
fn fixture_files_match_library_channels() {
    let pairs = [
        ("two_block_q0.5.json", two_block_channel(0.5, &hadamard(), &phase()).unwrap()),
        ("block_unitary_q0.6.json", block_unitary_channel(0.6, &hadamard(), &phase(), &flip()).unwrap()),
        ("corner_leak_q0.25.json", corner_leak_channel(0.25).unwrap()),
        ("block_shift.json", block_shift_channel().unwrap()),
    ];
    for (name, ch) in pairs {
        let gap = max_abs(&(read_kraus(name).superoperator() - ch.superoperator()));
        assert!(gap <= 1e-15, "{name}: {gap:e}");
    }
}

#[test]
fn validate_reports_unitality() {
    let (code, v) = json(&["validate", "--channel", &fixture("block_unitary_q0.6.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["unital"], Value::Bool(true));
    let (code, v) = json(&["validate", "--channel", &fixture("corner_leak_q0.25.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["unital"], Value::Bool(false));
    assert!((as_f64(&v["results"]["unital_residual"]) - 0.25).abs() <= 1e-12);
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"dim\": 2,\n  \"kraus\": [[[1.0, 0.0] oops\n}\n").unwrap();
    let out = run(&["validate", "--channel", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("parse error"), "{err}");
    assert!(err.contains("line 3, column"), "{err}");
}

#[test]
fn non_trace_preserving_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lossy.json");
    std::fs::write(&path, r#"{"dim": 1, "kraus": [[[[0.5, 0.0]]]]}"#).unwrap();
    let out = run(&["validate", "--channel", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("not trace preserving"));
}

#[test]
fn rank_of_correctable_subspace() {
    let (code, v) = json(&["rank", "--channel", &fixture("block_unitary_q0.6.json"), "--basis-indices", "0,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["correction_rank"], Value::from(2));
}

#[test]
fn kl_violation_exits_with_two() {
    // On span{e0, e2}, P E1†E2 P has off-diagonal entry q·sqrt(1 - q²) = 0.48
    // and zero diagonal, so the worst violation is exactly 0.48.
    let (code, v) = json(&["kl", "--channel", &fixture("block_unitary_q0.6.json"), "--basis-indices", "0,2"]);
    assert_eq!(code, 2);
    assert_eq!(v["outcome"], Value::from("negative"));
    let residual = as_f64(&v["results"]["violation"]["residual"]);
    assert!((residual - 0.6 * 0.8).abs() <= 1e-12, "{residual}");
}

#[test]
fn md_of_mixing_channel_is_empty() {
    let (code, v) = json(&["md", "--channel", &fixture("symmetric_q0.5.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["domain"]["dimension"], Value::from(0));
    let (code, v) = json(&["ucc", "--channel", &fixture("symmetric_q0.5.json")]);
    assert_eq!(code, 2);
    assert_eq!(v["results"]["count"], Value::from(0));
}

#[test]
fn md_and_ucc_on_block_channels() {
    let (code, v) = json(&["md", "--channel", &fixture("symmetric_q0.0.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["domain"]["dimension"], Value::from(8));
    let (code, v) = json(&["ucc", "--channel", &fixture("block_shift.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["count"], Value::from(1));
}

#[test]
fn ucc_with_isometry_file() {
    let dir = tempfile::tempdir().unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for sign in [1.0, -1.0] {
        // Columns |±⟩⊗|0⟩ and |±⟩⊗|1⟩ in C² ⊗ C².
        let rows = [[s, 0.0], [0.0, s], [sign * s, 0.0], [0.0, sign * s]];
        let data: Vec<Vec<[f64; 2]>> = rows.iter().map(|r| r.iter().map(|&x| [x, 0.0]).collect()).collect();
        let path = dir.path().join(format!("code{sign}.json"));
        std::fs::write(&path, serde_json::to_string(&data).unwrap()).unwrap();
        let (code, v) = json(&["ucc", "--channel", &fixture("symmetric_q1.0.json"), "--isometry", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(as_f64(&v["results"]["code"]["residual"]) <= 1e-8);
    }
}

#[test]
fn projector_code_on_corner_leak() {
    let dir = tempfile::tempdir().unwrap();
    let p: Vec<Vec<[f64; 2]>> = (0..4)
        .map(|i| (0..4).map(|j| [if i == j && (i == 1 || i == 2) { 1.0 } else { 0.0 }, 0.0]).collect())
        .collect();
    let path = dir.path().join("p.json");
    std::fs::write(&path, serde_json::to_string(&p).unwrap()).unwrap();
    let (code, v) = json(&["rank", "--channel", &fixture("corner_leak_q0.25.json"), "--projector", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["correction_rank"], Value::from(1));
}

#[test]
fn recovery_file_round_trips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("recovery.json");
    let (code, v) = json(&[
        "recover",
        "--channel",
        &fixture("two_block_q0.5.json"),
        "--basis-indices",
        "0,1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["certificate"]["passes"], Value::Bool(true));
    let weights: Vec<f64> = v["results"]["weights"].as_array().unwrap().iter().map(as_f64).collect();
    assert!((weights[0] - 0.75).abs() <= 1e-9 && (weights[1] - 0.25).abs() <= 1e-9);
    let (code, _) = json(&["validate", "--channel", out.to_str().unwrap()]);
    assert_eq!(code, 0);
}

#[test]
fn four_check_requires_unital_channel() {
    let (code, v) = json(&["four-check", "--channel", &fixture("block_unitary_q0.6.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["agree"], Value::Bool(true));
    let out = run(&["four-check", "--channel", &fixture("corner_leak_q0.25.json")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decompose_each_algebra() {
    // At q = 0 the Kraus operators are commuting multiples of J ⊗ I and
    // K ⊗ I, so they generate a two-dimensional algebra whose commutant is
    // the eight-dimensional UCC algebra.
    for (algebra, dim) in [("md", 8), ("ucc", 8), ("errors", 2)] {
        let (code, v) = json(&["decompose", "--channel", &fixture("symmetric_q0.0.json"), "--algebra", algebra]);
        assert_eq!(code, 0, "{algebra}");
        assert_eq!(v["results"]["structure"]["dimension"], Value::from(dim), "{algebra}");
    }
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        vec!["md", "--channel", "FIX", "--seed", "5"],
        vec!["decompose", "--channel", "FIX", "--algebra", "errors", "--seed", "9", "--json"],
        vec!["ucc", "--channel", "FIX", "--seed", "2", "--json"],
    ] {
        let path = fixture("block_shift.json");
        let args: Vec<&str> = args.iter().map(|a| if *a == "FIX" { path.as_str() } else { a }).collect();
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn missing_code_is_an_error() {
    let out = run(&["kl", "--channel", &fixture("block_shift.json")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn paper_examples_all_pass() {
    let (code, v) = json(&["paper-examples"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["failed"], Value::from(0));
    assert!(v["results"]["total"].as_u64().unwrap() > 20);
}
