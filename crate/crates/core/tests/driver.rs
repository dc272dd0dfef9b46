use std::fs;

use leray_core::driver::{
    check_report, emit_reports, read_report, run_lambda_sweep, state_dir_name, ExperimentConfig, GridPolicy,
    SweepReport,
};
use leray_core::solver::load_state;

fn tiny(lambdas: Vec<f64>, radii: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        lambdas,
        radii,
        grid: GridPolicy {
            per_octave: 16.0,
            n_theta: 32,
        },
        ..Default::default()
    }
}

fn strip_metadata(text: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("metadata");
    serde_json::to_string(&v).unwrap()
}

#[test]
fn single_lambda_single_radius_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let (rep, runs) = run_lambda_sweep(&tiny(vec![0.1], vec![10.0])).unwrap();
    assert_eq!(rep.rows.len(), 1);
    emit_reports(&rep, &runs, dir.path()).unwrap();
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let header_cols = csv.lines().next().unwrap().split(',').count();
    assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), header_cols);
    let state = load_state(&dir.path().join(state_dir_name(0.1, 10.0))).unwrap();
    assert_eq!(state.lambda, 0.1);
    assert!(fs::read_to_string(dir.path().join("osc_ratio.svg"))
        .unwrap()
        .contains("<polyline"));
}

#[test]
fn report_schema_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (rep, runs) = run_lambda_sweep(&tiny(vec![0.05, 0.1], vec![10.0, 20.0])).unwrap();
    emit_reports(&rep, &runs, dir.path()).unwrap();
    let path = dir.path().join("report.json");
    let text = fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["config", "rows", "metadata"] {
        assert!(v.get(key).is_some());
    }
    for key in [
        "lambda",
        "r",
        "d_total",
        "d_normalized",
        "force",
        "slacks",
        "blowdown",
        "lambda0",
        "tail",
    ] {
        assert!(v["rows"][0].get(key).is_some(), "{key}");
    }
    assert!(v["rows"][0]["tail"]["quarter"].is_number() && v["rows"][0]["tail"]["half"].is_number());
    let back: SweepReport = read_report(&path).unwrap();
    assert_eq!(back, rep);
    assert_eq!(serde_json::to_string_pretty(&back).unwrap() + "\n", text);
    assert!(check_report(&back).passed());
}

#[test]
fn identical_configs_give_identical_reports() {
    let cfg = tiny(vec![0.1, 0.2], vec![10.0, 20.0]);
    let a = serde_json::to_string(&run_lambda_sweep(&cfg).unwrap().0).unwrap();
    let b = serde_json::to_string(&run_lambda_sweep(&cfg).unwrap().0).unwrap();
    assert_eq!(strip_metadata(&a), strip_metadata(&b));
}

#[test]
fn normalized_energy_and_far_field() {
    let (rep, _) = run_lambda_sweep(&tiny(vec![0.1], vec![10.0, 20.0])).unwrap();
    for row in &rep.rows {
        let expect = row.d_total * 0.1f64.ln().abs() / 0.01;
        assert!((row.d_normalized - expect).abs() <= 1e-14 * expect);
        assert!(row.lambda0 < row.lambda * (1.0 + 1e-6));
        assert!(row.tail.half <= row.tail.quarter && row.tail.half >= -1e-12);
    }
    assert!(rep.rows[0].leray_diff.is_none());
    assert!(rep.rows[1].leray_diff.unwrap() > 0.0);
}

#[test]
fn tampered_slack_fails_the_check() {
    let (mut rep, _) = run_lambda_sweep(&tiny(vec![0.1], vec![10.0])).unwrap();
    assert!(check_report(&rep).passed());
    let s = rep.rows[0].slacks.get_mut("energy_identity").unwrap();
    s.value = 1.0;
    let out = check_report(&rep);
    assert!(!out.passed());
    assert!(out.failures[0].contains("energy_identity"));
}
