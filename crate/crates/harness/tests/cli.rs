use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lossylab::{RunReport, Status};
use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn lossylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lossylab")).args(args).env_remove("LOSSYLAB_SEED").output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lossylab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lossylab(&[]).status.code(), Some(2));
    assert_eq!(lossylab(&["--help"]).status.code(), Some(0));
    let perfect = scenario("parity-or-perfect.json");
    assert_eq!(lossylab(&["--jobs", "0", "run", path(&perfect)]).status.code(), Some(2));
    assert_eq!(lossylab(&["--exhaustive", "--sampled", "run", path(&perfect)]).status.code(), Some(2));
    assert_eq!(lossylab(&["run", "/nonexistent/scenario.json"]).status.code(), Some(2));
}

#[test]
fn parse_errors_carry_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"schema_version\": 1,\n  \"name\": oops\n}\n").unwrap();
    let out = lossylab(&["run", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");
}

#[test]
fn perfect_scenario_passes_and_reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("perfect.json");
    let out = lossylab(&["--out", path(&out_path), "run", path(&scenario("parity-or-perfect.json"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: RunReport = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(rep.all_passed);
    assert!(rep.verdicts.iter().all(|v| v.status != Status::Fail));
    let normalized: Value = serde_json::from_str(&rep.normalized()).unwrap();
    assert!(normalized.get("timing").is_none());
    assert_eq!(lossylab(&["report", path(&out_path)]).status.code(), Some(0));
}

#[test]
fn negative_control_exits_1() {
    let out = lossylab(&["run", path(&scenario("identity-negative-control.json"))]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL"), "{text}");
}

#[test]
fn missing_seed_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(scenario("parity-or-perfect.json")).unwrap()).unwrap();
    doc.as_object_mut().unwrap().remove("seed");
    let unseeded = dir.path().join("unseeded.json");
    std::fs::write(&unseeded, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let out = lossylab(&["disguise", path(&unseeded)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    assert_eq!(lossylab(&["--seed", "11", "disguise", path(&unseeded)]).status.code(), Some(0));
    let from_env = Command::new(env!("CARGO_BIN_EXE_lossylab"))
        .args(["disguise", path(&unseeded)])
        .env("LOSSYLAB_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(from_env.status.code(), Some(0));
}

#[test]
fn params_block_prints_thresholds() {
    let out = lossylab(&["params", path(&scenario("gap-dichotomy.params.json"))]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("θ"));
}
