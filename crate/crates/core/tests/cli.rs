use std::path::Path;
use std::process::{Command, Output};

use lfgate::cli::{ExperimentConfig, RunManifest};
use serde_json::Value;

fn lfgate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lfgate")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).expect("file exists")).expect("valid json")
}

fn synthesize(dir: &Path, extra: &[&str]) {
    let mut args = vec!["synthesize", "--out", path(dir), "--seed", "3"];
    args.extend(extra);
    let out = lfgate(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_config_key_exits_2_with_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, "{\n  \"seed\": 1,\n  \"nosie\": {}\n}\n").unwrap();
    let out = lfgate(&["error-budget", "--config", path(&cfg), "--out", path(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn invalid_value_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, "{\n  \"estimate\": {\n    \"n_boot\": 0\n  }\n}\n").unwrap();
    let out = lfgate(&["estimate", "--bundle", "x", "--config", path(&cfg), "--out", path(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synthesize_then_estimate() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle = tmp.path().join("bundle");
    synthesize(&bundle, &["--target", "antisymmetric", "--fidelity", "0.99"]);
    let truth = read_json(&bundle.join("truth.json"));
    assert!((truth["leakage_corrected_fidelity"].as_f64().unwrap() - 0.99).abs() < 1e-12, "{truth}");
    assert!(truth["true_fidelity"].as_f64().unwrap() < 0.99);

    let out_dir = tmp.path().join("est");
    let out = lfgate(&["estimate", "--bundle", path(&bundle), "--n-boot", "100", "--out", path(&out_dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stdout, read_json(&out_dir.join("estimate.json")));
    let report = read_json(&out_dir.join("estimate.json"));
    let estimates = report["estimates"].as_array().unwrap();
    assert_eq!(estimates.len(), 2);
    for e in estimates {
        let point = e["point"].as_f64().unwrap();
        assert!((point - 0.99).abs() < 0.02, "{e}");
    }
    assert!(out_dir.join("estimate.csv").is_file());

    let manifest = RunManifest::read(&out_dir).unwrap();
    assert_eq!(manifest.command, "estimate");
    assert!(manifest.verify(&out_dir).unwrap().is_empty());
    std::fs::write(out_dir.join("estimate.csv"), "tampered").unwrap();
    assert_eq!(manifest.verify(&out_dir).unwrap(), vec!["estimate.csv".to_string()]);
}

#[test]
fn population_only_bundle_reports_populations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"dataset": {"parity_phases_rad": []}}"#).unwrap();
    let bundle = tmp.path().join("bundle");
    synthesize(&bundle, &["--config", path(&cfg)]);
    let out_dir = tmp.path().join("est");
    let out = lfgate(&["estimate", "--bundle", path(&bundle), "--n-boot", "50", "--out", path(&out_dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&out_dir.join("estimate.json"));
    let populations: Vec<f64> = serde_json::from_value(report["populations"].clone()).unwrap();
    assert_eq!(populations.len(), 3);
    assert!((populations.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(report["estimates"].as_array().map_or(true, |a| a.is_empty()));
}

#[test]
fn missing_reference_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle = tmp.path().join("bundle");
    synthesize(&bundle, &[]);
    std::fs::remove_file(bundle.join("reference_dark_000.json")).unwrap();
    let out = lfgate(&["estimate", "--bundle", path(&bundle), "--n-boot", "50", "--out", path(&tmp.path().join("est"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reference"));
}

#[test]
fn saved_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("a");
    let out = lfgate(&["simulate-gate", "--addressing", "--seed", "9", "--out", path(&first)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&first.join("gate_report.json"));
    assert!(report["bell_infidelity"].as_f64().unwrap().abs() < 1e-8);
    assert!(report["singlet_fidelity"].as_f64().unwrap() > 1.0 - 1e-8);

    let saved = ExperimentConfig::load(&first.join("config.json")).unwrap();
    assert_eq!(saved.seed, 9);
    assert!(saved.schedule.addressing);
    let second = tmp.path().join("b");
    let out = lfgate(&["simulate-gate", "--config", path(&first.join("config.json")), "--out", path(&second)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(first.join("run_manifest.json")).unwrap(), std::fs::read(second.join("run_manifest.json")).unwrap());
}

#[test]
fn csv_format_and_scan_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lfgate(&["scan", "--points", "3", "--format", "csv", "--out", path(tmp.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 4, "{csv}");
    for f in ["scan.json", "scan.csv", "scan.svg", "config.json", "run_manifest.json"] {
        assert!(tmp.path().join(f).is_file(), "{f}");
    }
    assert!(std::fs::read_to_string(tmp.path().join("scan.svg")).unwrap().starts_with("<svg"));
}
