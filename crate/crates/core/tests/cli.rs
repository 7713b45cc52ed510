mod common;

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use common::oracle::ALLEN_CAHN_T_HALF_R;
use edl::cli::{Cli, RunConfig};
use serde_json::Value;

fn edl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edl")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn error_json(o: &Output) -> Value {
    serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap()
}

#[test]
fn profile_hemisphere_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = edl(&["profile", "--f", "linear:2", "--t", "1", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let j = read_json(&dir.path().join("profile.json"));
    let r = j["metadata"]["r_t"].as_f64().unwrap();
    assert!((r - FRAC_PI_2).abs() < 1e-10, "{r}");
    let csv = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(csv.starts_with("rho,U,Uprime,Usecond\n"));
    assert!(csv.lines().count() > 1000);
}

#[test]
fn profile_allen_cahn_radius() {
    let o = edl(&["profile", "--f", "allen-cahn", "--t", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = j["metadata"]["r_t"].as_f64().unwrap();
    assert!((r - ALLEN_CAHN_T_HALF_R).abs() < 1e-8, "{r}");
}

#[test]
fn config_round_trips_through_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["edl", "profile", "--f", "linear:3", "--t", "0.7", "--rtol", "1e-11", "--out", out];
    let expected = Cli::parse_from(args).command.config().unwrap();
    assert_eq!(edl(&args[1..]).status.code(), Some(0));
    let j = read_json(&dir.path().join("profile.json"));
    let back: RunConfig = serde_json::from_value(j["config"].clone()).unwrap();
    assert_eq!(back, expected);

    let args = ["edl", "qform", "--field", "synthetic:z2", "--n-rho", "16", "--n-theta", "32", "--out", out];
    let expected = Cli::parse_from(args).command.config().unwrap();
    assert_eq!(edl(&args[1..]).status.code(), Some(0));
    let j = read_json(&dir.path().join("qform.json"));
    let back: RunConfig = serde_json::from_value(j["config"].clone()).unwrap();
    assert_eq!(back, expected);
}

#[test]
fn negative_t_is_a_config_error() {
    let o = edl(&["profile", "--f", "linear:2", "--t", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert!(e["error"].as_str().unwrap().contains("t must be positive"));
    assert_eq!(e["kind"], "invalid_input");
}

#[test]
fn unknown_nonlinearity_is_a_config_error() {
    let o = edl(&["verify", "--f", "cubic"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["kind"], "invalid_input");
}

#[test]
fn verify_linear_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = edl(&["verify", "--f", "linear:2", "--n", "6", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
    // per-t checks for six values, two sweep-wide checks, hypothesis, properness, summary
    assert!(text.lines().filter(|l| l.contains("H-positive")).count() == 6);
    assert!(text.contains("properness"));
    let j = read_json(&dir.path().join("verify.json"));
    assert_eq!(j["all_pass"], true);
}

#[test]
fn verify_allen_cahn_all_pass() {
    let o = edl(&["verify", "--f", "allen-cahn", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_exponential_fails_hypothesis() {
    let o = edl(&["verify", "--f", "exp", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.contains("hypothesis")).unwrap();
    assert!(line.starts_with("FAIL"), "{line}");
    assert!(line.contains("worst="));
}

fn eigen_rows(text: &str) -> Vec<[f64; 3]> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,R,alpha"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

#[test]
fn eigen_table() {
    let o = edl(&["eigen", "--lambda", "2", "--radius", "1.5708"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("2.00000000000,1.57079632679,"), "{text}");
    let rows = eigen_rows(&text);
    assert!((rows[1][0] - 2.0).abs() < 1e-4);
    assert_eq!(rows[1][1], 1.5708);
    assert!((rows[0][2] + 1.0).abs() < 1e-10);
}

#[test]
fn eigen_sweep_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    let o = edl(&["eigen", "--lambda-sweep", "0.5:20:10", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows = eigen_rows(&stdout(&o));
    assert_eq!(rows.len(), 10);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
    let file = fs::read_to_string(dir.path().join("eigen.csv")).unwrap();
    assert_eq!(file, stdout(&o));
    // 12 significant digits
    for line in file.lines().skip(1) {
        for cell in line.split(',') {
            let digits = cell.split('e').next().unwrap().chars().filter(char::is_ascii_digit);
            let digits: String = digits.collect();
            assert_eq!(digits.trim_start_matches('0').len(), 12, "{cell}");
        }
    }
}

#[test]
fn eigen_without_targets_is_an_error() {
    let o = edl(&["eigen"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn qform_member_is_identically_zero() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["qform", "--f", "allen-cahn", "--field", "member", "--n-rho", "32", "--n-theta", "64"];
    let o = edl(&[&args[..], &["--out", dir.path().to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(0));
    let j = read_json(&dir.path().join("qform.json"));
    assert_eq!(j["summary"]["identically_zero"], true);
    assert!(j["summary"]["max_modulus"].as_f64().unwrap() < 1e-7);
    let csv = fs::read_to_string(dir.path().join("qform.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 1 + 32 * 64);
}

#[test]
fn qform_synthetic_z1() {
    let dir = tempfile::tempdir().unwrap();
    let o = edl(&["qform", "--field", "synthetic:z1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let zeros = read_json(&dir.path().join("qform.json"))["summary"]["zeros"].clone();
    let zeros = zeros.as_array().unwrap();
    assert_eq!(zeros.len(), 1);
    assert_eq!(zeros[0]["index"].as_f64(), Some(-0.5));
}

#[test]
fn qform_conjugate_control_exits_one() {
    let o = edl(&["qform", "--field", "synthetic:conj"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("index=1/2 VIOLATES"));
}

#[test]
fn qform_perturbed_negative_indices() {
    let dir = tempfile::tempdir().unwrap();
    let o = edl(&["qform", "--f", "allen-cahn", "--field", "perturbed:1e-2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = read_json(&dir.path().join("qform.json"))["summary"].clone();
    assert_eq!(s["identically_zero"], false);
    assert!(s["max_modulus"].as_f64().unwrap() > 1e-3);
    let zeros = s["zeros"].as_array().unwrap();
    assert!(!zeros.is_empty());
    assert!(zeros.iter().all(|z| z["index"].as_f64().unwrap() < 0.0));
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    // same output directory each time: the path is part of the embedded config
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_edl"));
        cmd.args(["qform", "--f", "allen-cahn", "--field", "perturbed:5e-3", "--n-rho", "24", "--n-theta", "48"]);
        cmd.args(["--knots", "12", "--out", dir.path().to_str().unwrap()]);
        if let Some(t) = threads {
            cmd.env("EDL_THREADS", t);
        }
        assert_eq!(cmd.output().unwrap().status.code(), Some(0));
        ["qform.csv", "qform.json"].map(|f| fs::read(dir.path().join(f)).unwrap())
    };
    let a = run(None);
    assert_eq!(a, run(None));
    assert_eq!(a, run(Some("1")));
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_edl"))
        .args(["eigen", "--lambda", "1"])
        .env("EDL_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
