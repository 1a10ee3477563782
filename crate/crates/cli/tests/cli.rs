use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cellplan_cli::{exit_code, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_LIMIT, EXIT_OPTIMAL, EXIT_UNBOUNDED};
use cellplan_core::SolveStatus;

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name)
}

fn cellplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellplan")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn status_codes() {
    assert_eq!(exit_code(SolveStatus::Optimal), EXIT_OPTIMAL);
    assert_eq!(exit_code(SolveStatus::Infeasible), EXIT_INFEASIBLE);
    assert_eq!(exit_code(SolveStatus::Unbounded), EXIT_UNBOUNDED);
    assert_eq!(exit_code(SolveStatus::Feasible), EXIT_LIMIT);
    assert_eq!(exit_code(SolveStatus::NoSolution), EXIT_LIMIT);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&cellplan(&[])), EXIT_ERROR);
    assert_eq!(code(&cellplan(&["solve", "sudoku", "x.json"])), EXIT_ERROR);
    assert_eq!(code(&cellplan(&["solve", "knapsack"])), EXIT_ERROR);
    let bad_gap = cellplan(&["solve", "knapsack", instance("knapsack.json").to_str().unwrap(), "--gap", "-1"]);
    assert_eq!(code(&bad_gap), EXIT_ERROR);
    assert_eq!(code(&cellplan(&["--help"])), EXIT_OPTIMAL);
}

#[test]
fn unreadable_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = cellplan(&["solve", "knapsack", missing.to_str().unwrap()]);
    assert_eq!(code(&out), EXIT_ERROR);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.json"));

    let garbage = write(dir.path(), "bad.json", "{\"profits\": [1, 2");
    assert_eq!(code(&cellplan(&["solve", "knapsack", &garbage])), EXIT_ERROR);
    let mismatched = write(dir.path(), "mismatch.json", r#"{"profits": [1, 2], "weights": [1], "capacity": 3}"#);
    assert_eq!(code(&cellplan(&["solve", "knapsack", &mismatched])), EXIT_ERROR);
    // A job-shop file is not a knapsack.
    let other = instance("jobshop.json");
    assert_eq!(code(&cellplan(&["solve", "knapsack", other.to_str().unwrap()])), EXIT_ERROR);
}

#[test]
fn infeasible_project_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "over.json",
        r#"{"durations": [2, 1], "usages": [[5], [1]], "capacities": [3], "precedence": [[1, 2]]}"#,
    );
    let out = cellplan(&["solve", "rcpsp", &path]);
    assert_eq!(code(&out), EXIT_INFEASIBLE);
    assert!(String::from_utf8_lossy(&out.stdout).contains("infeasible"));
    assert_eq!(code(&cellplan(&["oracle", "rcpsp", &path])), EXIT_INFEASIBLE);
    let svg = dir.path().join("none.svg");
    assert_eq!(code(&cellplan(&["solve", "rcpsp", &path, "--svg", svg.to_str().unwrap()])), EXIT_ERROR);
}

#[test]
fn tiny_time_limit_exits_four() {
    let out = cellplan(&["solve", "tsp", instance("tsp.json").to_str().unwrap(), "--time-limit", "1e-9"]);
    assert_eq!(code(&out), EXIT_LIMIT);
}

#[test]
fn knapsack_run_writes_report_and_chart() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instance("knapsack.json");
    let (json, svg) = (dir.path().join("r.json"), dir.path().join("r.svg"));
    let out = cellplan(&[
        "solve",
        "knapsack",
        inst.to_str().unwrap(),
        "--output",
        json.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), EXIT_OPTIMAL);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("objective: 41"), "{stdout}");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["status"], "Optimal");
    assert_eq!(report["objective"], 41.0);
    assert_eq!(report["plan"]["items"], serde_json::json!([1, 4]));
    roxmltree::Document::parse(&std::fs::read_to_string(&svg).unwrap()).unwrap();

    let check = cellplan(&["check", "knapsack", inst.to_str().unwrap(), json.to_str().unwrap()]);
    assert_eq!(code(&check), EXIT_OPTIMAL);

    // A tampered plan is rejected.
    let mut tampered = report.clone();
    tampered["plan"]["chosen"] = serde_json::json!([0, 1, 3]);
    let bad = write(dir.path(), "bad.json", &tampered.to_string());
    assert_eq!(code(&cellplan(&["check", "knapsack", inst.to_str().unwrap(), &bad])), EXIT_ERROR);
}

#[test]
fn oracle_reports_optimum() {
    let out = cellplan(&["oracle", "jobshop", instance("jobshop.json").to_str().unwrap()]);
    assert_eq!(code(&out), EXIT_OPTIMAL);
    assert!(String::from_utf8_lossy(&out.stdout).contains("optimum: 7"));
    // Six candidate sites exceed the enumeration limit.
    let out = cellplan(&["oracle", "facility", instance("facility.json").to_str().unwrap()]);
    assert_eq!(code(&out), EXIT_ERROR);
}
