use std::path::Path;
use std::process::{Command, Output};

use phiconv_cli::Report;
use serde_json::Value;

const LINE: &str = r#"{
  "ground": { "points": [[0], [1], [2]] },
  "phi": { "kind": "affine" },
  "f": { "values": [0, 0, 1] },
  "sets": { "A": [0, 2], "K": [0, 1, 2] }
}
"#;

fn phiconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phiconv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn report(out: &Output) -> Report {
    Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

fn without_timing(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn hull_on_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "line.json", LINE);
    let out = phiconv(&["hull", "--problem", &p, "--set", "A"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out).result_set("hull"), Some(vec![0, 1, 2]));
}

#[test]
fn check_exposed_mode_passes() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "line.json", LINE);
    let out = phiconv(&["check", "--problem", &p, "--set", "K", "--mode", "exposed"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.result_set("generators"), Some(vec![0, 2]));
    assert!(r.check_named("reconstruction").unwrap().pass);
}

#[test]
fn hypothesis_violation_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "line.json", LINE);
    let out = phiconv(&["check", "--problem", &p, "--set", "A"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not Φ-convex"));
}

#[test]
fn malformed_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.json", "{\n  \"ground\": { \"points\": [[0]] },\n  \"phi\": { \"kind\": \"affine\" },\n  \"extra\": 1\n}\n");
    let out = phiconv(&["exposed", "--problem", &p]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("bad.json:4:"), "{err}");
    assert!(err.contains("extra"), "{err}");
}

#[test]
fn validation_error_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "v.json", &LINE.replace("[0, 2]", "[0, 5]"));
    let out = phiconv(&["hull", "--problem", &p, "--set", "A"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sets.A[1]"));
}

#[test]
fn out_file_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "line.json", LINE);
    let mut texts = Vec::new();
    for i in 0..2 {
        let out_path = dir.path().join(format!("r{i}.json")).display().to_string();
        let out = phiconv(&["variational", "--problem", &p, "--seed", "11", "--samples", "200", "--out", &out_path]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        texts.push(std::fs::read_to_string(&out_path).unwrap());
    }
    assert_eq!(without_timing(&texts[0]), without_timing(&texts[1]));
    let r = Report::from_json(&texts[0]).unwrap();
    assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    assert_eq!(r.seed, Some(11));
    assert_eq!(r.results["ill_posed"]["samples"], 200);
}

#[test]
fn exposed_set_survives_reread() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "line.json", LINE);
    let out_path = dir.path().join("e.json").display().to_string();
    let out = phiconv(&["exposed", "--problem", &p, "--set", "K", "--out", &out_path, "--text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS] witnesses_verify"));
    let r = Report::from_json(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r.result_set("exposed"), Some(vec![0, 2]));
}

#[test]
fn failed_checks_exit_nonzero_with_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    // Constants only: every c ties all points, so the perturbation search fails.
    let p = write(
        dir.path(),
        "flat.json",
        r#"{ "ground": { "points": [[0], [1]] }, "phi": { "kind": "table", "rows": [[1, 1]] },
             "f": { "values": [0, 0] }, "task": { "budget": 20 } }"#,
    );
    let out = phiconv(&["variational", "--problem", &p]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let failed: Vec<_> = r.checks.iter().filter(|c| !c.pass).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c.counterexample.is_some()));
}

#[test]
fn gallery_entries() {
    let out = phiconv(&["gallery", "line3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out).result_set("shilov"), Some(vec![0, 2]));
    let out = phiconv(&["gallery", "truncated_cube(9)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown gallery"));
}
