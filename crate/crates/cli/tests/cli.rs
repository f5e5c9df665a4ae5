use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use rigidity_cli::report::ReportRecord;
use rigidity_core::{json, models};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rigidity"));
    cmd.env_remove("RIGIDITY_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_model(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut full = vec!["model"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", path.to_str().unwrap()]);
    assert_eq!(run(&full).status.code(), Some(0));
    path
}

#[test]
fn veronese_check_is_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), "v.json", &["veronese"]);
    let out = run(&[
        "--no-timestamp",
        "check",
        path.to_str().unwrap(),
        "--theorem",
        "thm1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let records: Vec<ReportRecord> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(records.len(), 1);
    let v = &records[0].verdicts[0];
    assert_eq!(v.status, rigidity_core::PinchStatus::Boundary);
    assert_eq!(v.label, rigidity_core::ModelLabel::Veronese);
    assert!(records[0].timing.is_none());
}

#[test]
fn exit_codes_follow_verdicts() {
    let fails = run(&["check", fixture("fails.json").to_str().unwrap()]);
    assert_eq!(fails.status.code(), Some(1));
    let ind = run(&[
        "check",
        fixture("indeterminate.json").to_str().unwrap(),
        "--starts",
        "4",
    ]);
    assert_eq!(ind.status.code(), Some(2));
}

#[test]
fn batch_exit_code_is_worst() {
    let dir = tempfile::tempdir().unwrap();
    let v = write_model(dir.path(), "v.json", &["veronese"]);
    let out = run(&[
        "check",
        v.to_str().unwrap(),
        fixture("fails.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out).as_array().unwrap().len(), 2);
}

#[test]
fn hypothesis_error_exits_six() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(
        dir.path(),
        "u.json",
        &["umbilical-sphere", "--n", "3", "--H", "1"],
    );
    let out = run(&["check", path.to_str().unwrap(), "--theorem", "thm1"]);
    assert_eq!(out.status.code(), Some(6));
    let records: Vec<ReportRecord> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(records[0].errors.len(), 1);
}

#[test]
fn malformed_and_missing_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let truncated = dir.path().join("t.json");
    std::fs::write(&truncated, "{\"n\": 2, \"p\":").unwrap();
    assert_eq!(
        run(&["check", truncated.to_str().unwrap()]).status.code(),
        Some(4)
    );

    let wrong = dir.path().join("w.json");
    std::fs::write(&wrong, "{\"n\": 2}").unwrap();
    assert_eq!(
        run(&["check", wrong.to_str().unwrap()]).status.code(),
        Some(6)
    );

    let missing = dir.path().join("absent.json");
    assert_eq!(
        run(&["check", missing.to_str().unwrap()]).status.code(),
        Some(5)
    );
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(run(&["model", "torus"]).status.code(), Some(3));
    assert_eq!(run(&["ddvv"]).status.code(), Some(3));
    assert_eq!(
        run(&["immersion", "--builtin", "helix"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["pinch"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn model_output_matches_library() {
    let out = run(&["model", "veronese"]);
    assert_eq!(out.status.code(), Some(0));
    let want = json::to_string(&models::veronese(1.0, 0.0).unwrap()) + "\n";
    assert_eq!(String::from_utf8(out.stdout).unwrap(), want);
}

#[test]
fn reports_are_reproducible_without_timestamp() {
    let path = fixture("indeterminate.json");
    let args = [
        "--no-timestamp",
        "--seed",
        "11",
        "check",
        path.to_str().unwrap(),
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);

    let records: Vec<ReportRecord> = serde_json::from_slice(&a.stdout).unwrap();
    let again = json::to_string(&records);
    let back: Vec<ReportRecord> = json::from_str(&again).unwrap();
    assert_eq!(back, records);
}

#[test]
fn timing_present_by_default() {
    let out = run(&["check", fixture("fails.json").to_str().unwrap()]);
    let v = stdout_json(&out);
    assert!(v[0]["timing"]["elapsed_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn clifford_grid() {
    let out = run(&["immersion", "--builtin", "clifford", "--grid", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let samples: Vec<rigidity_core::PointSample> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(samples.len(), 256);
    for s in &samples {
        let inv = rigidity_core::invariants(&s.data);
        assert!((inv.s - 2.0).abs() < 1e-6, "S = {}", inv.s);
    }
}

#[test]
fn immersion_samples_feed_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.json");
    let out = run(&[
        "immersion",
        "--builtin",
        "veronese",
        "--grid",
        "2",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "check",
        path.to_str().unwrap(),
        "--theorem",
        "thm1",
        "--tol",
        "1e-5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert!(v[3]["input"].as_str().unwrap().ends_with("#3"));
    for r in v.as_array().unwrap() {
        assert_eq!(r["verdicts"][0]["status"], "boundary");
    }
}

#[test]
fn pinch_table_and_single_values() {
    let out = run(&["pinch", "--table", "3", "4", "--exact"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 3 * 3);
    assert_eq!(lines[1], "1,2,0,1/3,0,0,0,");
    assert_eq!(lines[7], "3,2,2/5,1/3,3/8,1/3,1/3,1/3");

    let thm1 = run(&["pinch", "--theorem", "thm1", "--p", "2", "--exact"]);
    assert_eq!(String::from_utf8(thm1.stdout).unwrap(), "1/3\n");
    let thm2 = run(&[
        "pinch",
        "--theorem",
        "thm2",
        "--p",
        "3",
        "--c",
        "1",
        "--H",
        "1",
    ]);
    let v: f64 = String::from_utf8(thm2.stdout)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((v - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn ddvv_random_and_maximize() {
    let out = run(&["--seed", "3", "ddvv", "--random", "3", "3", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let max = v["max_ratio"].as_f64().unwrap();
    assert!(max > 0.0 && max <= 1.0 + 1e-12);
    assert!(v["mean_ratio"].as_f64().unwrap() <= max);

    let out = run(&["ddvv", "--maximize", "2", "2", "8"]);
    let v = stdout_json(&out);
    assert!(v["ratio"].as_f64().unwrap() > 1.0 - 1e-6);
    assert!(!v["extremal_structure"].is_null());
}

#[test]
fn ddvv_input_accepts_tuples_and_data() {
    let dir = tempfile::tempdir().unwrap();
    let tuple = dir.path().join("t.json");
    std::fs::write(&tuple, "[[[1,0],[0,-1]],[[0,1],[1,0]]]").unwrap();
    let v = stdout_json(&run(&["ddvv", "--input", tuple.to_str().unwrap()]));
    assert!((v["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["equality"], true);

    let data = write_model(dir.path(), "v.json", &["veronese"]);
    let w = stdout_json(&run(&["ddvv", "--input", data.to_str().unwrap()]));
    assert_eq!(v["ratio"], w["ratio"]);
}

#[test]
fn seed_from_environment() {
    let args = ["ddvv", "--random", "2", "3", "50"];
    let flag = bin().args(["--seed", "99"]).args(args).output().unwrap();
    let env = bin()
        .env("RIGIDITY_SEED", "99")
        .args(args)
        .output()
        .unwrap();
    let other = run(&args);
    assert_eq!(flag.stdout, env.stdout);
    assert_ne!(flag.stdout, other.stdout);
}
