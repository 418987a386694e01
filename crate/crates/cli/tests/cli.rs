use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn bellows(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellows")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json_out(o: &Output) -> Value {
    assert_eq!(code(o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn regular_gram(n: usize, c: f64) -> String {
    let size = n + 1;
    let entries: Vec<String> = (0..size * size).map(|i| format!("[{}]", if i / size == i % size { 1.0 } else { c })).collect();
    format!("{{\"n\": {n}, \"entries\": [{}]}}", entries.join(", "))
}

#[test]
fn volume_of_a_segment_is_its_length() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &regular_gram(1, 1f64.cosh()));
    let v = json_out(&bellows(&["volume", &g]));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn volume_and_oracle_agree() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &regular_gram(3, 1f64.cosh()));
    let a = json_out(&bellows(&["volume", &g]));
    let b = json_out(&bellows(&["oracle", &g, "--tol", "1e-9"]));
    let (a, b) = (a["value"].as_f64().unwrap(), b["value"].as_f64().unwrap());
    assert!((a - 0.090597925377724).abs() < 1e-9);
    assert!((a - b).abs() < 1e-8);
    assert_eq!(code(&bellows(&["volume", &g, "--space", "sphere"])), 2);
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &regular_gram(2, 1.5));
    let out = dir.path().join("r.json");
    let o = bellows(&["volume", &g, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(v["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn witness_minor_table() {
    let v = json_out(&bellows(&["witness", "3", "--k", "2", "--sigma", "-"]));
    assert_eq!(v["n"], 3);
    let minors = v["minors"].as_array().unwrap();
    assert!(!minors.is_empty());
    for m in minors {
        assert_eq!(m["zero"], m["expected_zero"], "{m}");
    }
    assert_eq!(minors.iter().filter(|m| m["zero"] == true).count(), 2);
}

#[test]
fn flex_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let o = bellows(&[
        "flex",
        fixture("quadrilateral.json").to_str().unwrap(),
        fixture("quadrilateral_edges.json").to_str().unwrap(),
        "--coords",
        fixture("quadrilateral_coords.json").to_str().unwrap(),
        "--steps",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,max_residual,volume,tmc");
    assert_eq!(lines.len(), 12);
    for l in &lines[1..] {
        let cols: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 4);
        assert!(cols[1] <= 1e-11);
    }
    let side: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("trace.csv.json")).unwrap()).unwrap();
    assert_eq!(side["steps"].as_array().unwrap().len(), 11);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "flex".to_string(),
        fixture("octahedron.json").to_str().unwrap().to_string(),
        fixture("octahedron_edges.json").to_str().unwrap().to_string(),
        "--coords".into(),
        fixture("octahedron_coords.json").to_str().unwrap().to_string(),
        "--steps".into(),
        "5".into(),
    ];
    let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
    let a = bellows(&args);
    let b = bellows(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let w1 = bellows(&["witness", "4", "--set", "1,3"]);
    let w2 = bellows(&["witness", "4", "--set", "1,3"]);
    assert_eq!(w1.stdout, w2.stdout);
}

#[test]
fn loop_link_and_continue() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("loop.json");
    let o = bellows(&["loop", "2", "--index", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let link = json_out(&bellows(&["link", out.to_str().unwrap()]));
    let lk = link["lk"].as_object().unwrap();
    assert_eq!(lk.values().filter(|v| v.as_i64() != Some(0)).count(), 1);
    let c = json_out(&bellows(&["continue", out.to_str().unwrap()]));
    assert_eq!(c["closed"], true);
    assert!(c["clearance"].as_f64().unwrap() > 0.0);
    // even dimension: the continued volume stays real at the basepoint
    assert!(c["defect"][1].as_f64().unwrap().abs() < 1e-6, "{c}");
    assert!(c["v_end"][1].as_f64().unwrap().abs() < 1e-6, "{c}");
    let l1 = json_out(&bellows(&["link", fixture("loop_n1.json").to_str().unwrap()]));
    assert!(l1["lk"].is_object());
}

#[test]
fn failed_verification_exits_with_one() {
    let o = bellows(&["verify-bellows", "--steps", "3", "--tol", "1e-300"]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn short_trace_keeps_invariants_but_moves_too_little() {
    let o = bellows(&["verify-bellows", "--steps", "5"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["max_angle_change"].as_f64().unwrap() < 0.1);
    assert!(v["volume_drift"].as_f64().unwrap() <= 1e-8);
    assert!(v["tmc_drift"].as_f64().unwrap() <= 1e-8);
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-11);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.json");
    assert_eq!(code(&bellows(&["volume", missing.to_str().unwrap()])), 2);
    let junk = write(dir.path(), "junk.json", "{not json");
    assert_eq!(code(&bellows(&["volume", &junk])), 2);
    let g = write(dir.path(), "g.json", &regular_gram(2, 1.5));
    assert_eq!(code(&bellows(&["volume", &g, "--space", "euclidean"])), 2);
    assert_eq!(code(&bellows(&["volume", &g, "--tol", "-1"])), 2);
    let outside = write(dir.path(), "o.json", &regular_gram(2, 0.5));
    assert_eq!(code(&bellows(&["volume", &outside])), 2);
    assert_eq!(code(&bellows(&["witness", "3", "--k", "3"])), 2);
    assert_eq!(code(&bellows(&["frobnicate"])), 2);
    let o = bellows(&["link", g.as_str()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn unsolvable_lengths_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let k = write(
        dir.path(),
        "k.json",
        r#"{"n": 3, "vertices": [0, 1, 2, 3], "facets": [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]]}"#,
    );
    let e = write(
        dir.path(),
        "e.json",
        r#"{"edges": {"0-1": 0.5, "0-2": 0.5, "1-2": 3.0, "0-3": 1.0, "1-3": 1.0, "2-3": 1.0}}"#,
    );
    let o = bellows(&["flex", &k, &e, "--steps", "2"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}
