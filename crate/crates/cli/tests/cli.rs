//! End-to-end behaviour of the `oscsum` binary: reports, formats,
//! configuration layering and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn oscsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscsum")).args(args).output().expect("spawn oscsum")
}

fn json(args: &[&str]) -> Value {
    let out = oscsum(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("oscsum-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn coeffnorm_reports_level_and_witness() {
    let v = json(&["coeffnorm", "--poly", "{(2):0.5}", "--R", "4"]);
    assert_eq!(v["command"], "coeffnorm");
    assert_eq!(v["result"]["s0"], 1);
    assert_eq!(v["result"]["witness_Q"], 2);
    assert_eq!(v["result"]["status"], "finite");
    assert_eq!(v["provenance"]["tool"], "oscsum");
}

#[test]
fn zero_polynomial_is_a_result_not_an_error() {
    let v = json(&["coeffnorm", "--poly", "{(2):0}", "--R", "8"]);
    assert_eq!(v["result"]["status"], "zero");
    assert_eq!(v["result"]["trivial_bound"], 0.0);
}

#[test]
fn gauss_sum_magnitude_for_q_three() {
    let v = json(&["gauss", "--Q", "3", "--A", "1", "--B", "0", "--d", "2", "--D", "1"]);
    let abs = v["result"]["abs"].as_f64().unwrap();
    assert!((abs - 3f64.sqrt() / 3.0).abs() < 1e-12);
    assert_eq!(v["result"]["exact_zero"], false);
}

#[test]
fn gauss_check_vanishing_flags_a_vanishing_point() {
    let v = json(&["gauss", "--Q", "4", "--A", "2", "--B", "1", "--check-vanishing"]);
    assert_eq!(v["result"]["exact_zero"], true);
    assert_eq!(v["result"]["vanishing"]["pass"], true);
}

#[test]
fn csv_starts_with_version_line_and_header() {
    let out = oscsum(&["--format", "csv", "coeffnorm", "--poly", "{(2):0.5}", "--R", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# oscsum-csv v1"));
    assert_eq!(lines.next(), Some("path,value"));
    assert!(text.lines().any(|l| l == "result.witness_Q,2"), "{text}");
    assert!(text.lines().any(|l| l == "command,coeffnorm"));
}

#[test]
fn config_file_then_set_then_flags() {
    let path = scratch("run.cfg");
    std::fs::write(&path, "# test config\nseed = 5\nmax_q = 777\ntheta = 0.3\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["--config", p, "gauss", "--Q", "3", "--A", "1"]);
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["config"]["max_q"], 777);
    assert_eq!(v["provenance"]["seed"], 5);
    let v = json(&["--config", p, "--set", "max_q=99", "--seed", "8", "gauss", "--Q", "3", "--A", "1"]);
    assert_eq!(v["config"]["max_q"], 99);
    assert_eq!(v["config"]["theta"], 0.3);
    assert_eq!(v["config"]["seed"], 8);
}

#[test]
fn out_writes_the_report_to_a_file() {
    let path = scratch("report.json");
    let out = oscsum(&["--out", path.to_str().unwrap(), "condense", "--alpha", "3/7", "--N", "200", "--multiples-of", "7", "--eps", "0"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "condense");
}

#[test]
fn input_echo_is_flat() {
    let v = json(&["expsum", "sum", "--poly", "{(2):1/4}", "--N", "8"]);
    assert_eq!(v["command"], "expsum sum");
    assert_eq!(v["input"]["mode"], "sum");
    assert!(v["input"]["poly_normalized"].is_object());
}

#[test]
fn exact_rational_invtest_returns_true_denominator() {
    let v = json(&["invtest", "--poly", "{(2):1/3}", "--exact", "--N", "1000", "--delta", "0.1"]);
    assert_eq!(v["result"]["outcome"]["outcome"], "certificate");
    assert_eq!(v["result"]["outcome"]["q"], 3);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(oscsum(&["--help"]).status.code(), Some(0));
    assert_eq!(oscsum(&["--version"]).status.code(), Some(0));
    assert_eq!(oscsum(&["schur", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["coeffnorm", "--poly", "{\"d\": 2,", "--R", "4"],
        &["coeffnorm", "--poly", "{(2):0.5}", "--R", "4", "--set", "max_q=0"],
        &["gauss", "--Q", "3", "--A", "1", "--set", "no_such_key=1"],
        &["--config", "/nonexistent/oscsum.cfg", "gauss", "--Q", "3", "--A", "1"],
    ] {
        let out = oscsum(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let out = Command::new(env!("CARGO_BIN_EXE_oscsum"))
        .args(["gauss", "--Q", "3", "--A", "1"])
        .env("OSCSUM_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_errors_exit_three() {
    let out = oscsum(&["recovery", "--Q", "3", "--A", "1,1,1", "--D", "2", "--n-max", "3000"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn domain_errors_exit_four() {
    let out = oscsum(&["invtest", "--poly", "{(2):1/3}", "--N", "100", "--delta", "1.5"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    let out = oscsum(&["gauss", "--Q", "0", "--A", "1"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn same_seed_same_bytes() {
    let args = ["--seed", "3", "expsum", "small-norm", "--R", "64", "--cases", "10"];
    assert_eq!(oscsum(&args).stdout, oscsum(&args).stdout);
    let other = oscsum(&["--seed", "4", "expsum", "small-norm", "--R", "64", "--cases", "10"]);
    assert_ne!(oscsum(&args).stdout, other.stdout);
}
