use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spgamma")).args(args).output().expect("spawn spgamma")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).expect("json report");
    (out.status.code().unwrap(), v)
}

#[test]
fn gamma_trivial_tau_matches_closed_form() {
    let (code, v) = json(&["gamma", "--p", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["matched"], true);
    for key in ["inputs", "exact", "float", "tokens", "timing", "suite_results"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let g = &v["exact"]["gamma"];
    assert_eq!(g["shift"], 1);
    assert_eq!(g, &v["exact"]["expected"]);
}

#[test]
fn q2_both_signs() {
    for sign in ["1", "-1"] {
        let (code, v) = json(&["q2", "--psi-sign", sign, "--tau-root-order", "5", "--tau-root-exp", "2"]);
        assert_eq!(code, 0);
        assert_eq!(v["matched"], true);
    }
}

#[test]
fn verify_hilbert_exits_zero() {
    let out = run(&["verify", "--suite", "hilbert"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("criterion 1: PASS"));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--suite", "weil-factor", "--format", "json", "--seed", "7"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["parameter", "--p", "7", "--l", "3", "--alpha", "3", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn pole_scan_and_parameter() {
    let (code, v) = json(&["pole-scan", "--p", "5", "--omega", "-1"]);
    assert_eq!(code, 0);
    assert_eq!(v["exact"]["rows"].as_array().unwrap().len(), 4);
    let (code, v) = json(&["parameter", "--p", "3", "--omega", "-1"]);
    assert_eq!(code, 0);
    let record: spgamma::langlands::ParamRecord = serde_json::from_value(v["exact"].clone()).unwrap();
    assert_eq!(record.omega_sign, -1);
    assert!(!v["tokens"].as_array().unwrap().is_empty());
}

#[test]
fn oracle_small() {
    let (code, v) = json(&["oracle", "--p", "3", "--depth", "3", "--tau-root-order", "2", "--tau-root-exp", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["exact"]["plain"]["match"], true);
    assert_eq!(v["exact"]["intertwined"]["match"], true);
}

#[test]
fn invalid_configs_are_rejected() {
    for args in [
        &["gamma", "--p", "2", "--alpha", "3"][..],
        &["pole-scan", "--p", "2"][..],
        &["gamma", "--p", "9"][..],
        &["gamma", "--p", "5", "--alpha", "3"][..],
        &["gamma", "--p", "5", "--omega", "2"][..],
        &["verify", "--suite", "nonsense"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}
