use std::path::Path;
use std::process::{Command, Output};

use qdthz::RunConfig;
use serde_json::Value;
use tempfile::TempDir;

/// Coarse grid and sweep so each run takes a fraction of a second.
const FAST: &str = r#"{"grid": {"n_points": 1024}, "sweep": {"n_points": 51}}"#;

fn qdthz(dir: &Path, config: Option<&str>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qdthz"));
    cmd.current_dir(dir).arg("--output-dir").arg(dir.join("out"));
    if let Some(text) = config {
        let path = dir.join("config.json");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.args(args).output().unwrap()
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn stark_map_writes_the_zero_field_row() {
    let d = TempDir::new().unwrap();
    ok(&qdthz(d.path(), Some(FAST), &["stark-map"]));
    let csv = std::fs::read_to_string(d.path().join("out/stark_map.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "e_MVpm,E10_meV,E20_meV,z01_nm,z12_nm,z02_nm");
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 0.0);
    assert!((row[1] / 12.25 - 1.0).abs() < 0.05, "E10 = {}", row[1]);
    assert_eq!(csv.lines().count(), 52);
}

#[test]
fn reruns_are_byte_identical() {
    let d = TempDir::new().unwrap();
    ok(&qdthz(d.path(), Some(FAST), &["stark-map"]));
    let csv = std::fs::read(d.path().join("out/stark_map.csv")).unwrap();
    let json = std::fs::read(d.path().join("out/stark_map.json")).unwrap();
    ok(&qdthz(d.path(), Some(FAST), &["stark-map"]));
    assert_eq!(csv, std::fs::read(d.path().join("out/stark_map.csv")).unwrap());
    assert_eq!(json, std::fs::read(d.path().join("out/stark_map.json")).unwrap());
}

#[test]
fn reports_embed_the_resolved_config_and_its_hash() {
    let d = TempDir::new().unwrap();
    ok(&qdthz(d.path(), Some(FAST), &["budgets", "--temperature", "10"]));
    let r = report(d.path(), "budgets.json");
    let cfg = RunConfig::from_json(&r["config"].to_string()).unwrap();
    assert_eq!(cfg.budgets.temperature_k, 10.0);
    assert_eq!(r["config_hash"].as_str().unwrap(), cfg.hash());
    let b = &r["result"]["budgets"];
    assert!((b["threshold_temperature_k"].as_f64().unwrap() - 116.045).abs() < 0.01);
    assert!(b["readout_rate_per_s"].as_f64().unwrap() >= 3e8);
}

#[test]
fn config_errors_exit_2() {
    let d = TempDir::new().unwrap();
    let out = qdthz(d.path(), Some(FAST), &["stark-map", "--field-min", "2", "--field-max", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty sweep range"));
    assert_eq!(qdthz(d.path(), Some(r#"{"bogus": true}"#), &["phonon"]).status.code(), Some(2));
    assert_eq!(qdthz(d.path(), Some("{ not json"), &["phonon"]).status.code(), Some(2));
    assert_eq!(qdthz(d.path(), None, &["cnot", "--delta-t", "0"]).status.code(), Some(2));
    assert_eq!(qdthz(d.path(), None, &["phonon", "--e10", "-1"]).status.code(), Some(2));
    assert_eq!(qdthz(d.path(), None, &["no-such-command"]).status.code(), Some(2));
}

#[test]
fn unreachable_resonance_exits_3() {
    let d = TempDir::new().unwrap();
    let cfg = r#"{"grid": {"n_points": 1024}, "sweep": {"n_points": 51}, "laser": {"photon_energy_mev": 40}}"#;
    let out = qdthz(d.path(), Some(cfg), &["operating-points"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("achievable range"));
}

#[test]
fn io_errors_exit_4() {
    let d = TempDir::new().unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qdthz"));
    let out = cmd.arg("--config").arg(d.path().join("missing.json")).arg("phonon").output().unwrap();
    assert_eq!(out.status.code(), Some(4));
    // Output directory below a regular file.
    std::fs::write(d.path().join("blocker"), "").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qdthz"))
        .arg("--output-dir")
        .arg(d.path().join("blocker/out"))
        .arg("phonon")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn phonon_reference_and_sweep() {
    let d = TempDir::new().unwrap();
    let cfg = r#"{"phonon": {"sweep": {"e10_min_mev": 8, "e10_max_mev": 16, "n_points": 5}}}"#;
    ok(&qdthz(d.path(), Some(cfg), &["phonon"]));
    let r = report(d.path(), "phonon.json");
    let tau = r["result"]["relaxation"]["tau_s"].as_f64().unwrap();
    assert!((75e-6..=300e-6).contains(&tau), "tau = {tau}");
    let csv = std::fs::read_to_string(d.path().join("out/phonon_sweep.csv")).unwrap();
    assert!(csv.starts_with("E10_meV,K10_per_nm,alpha,beta,tau_s\n8,"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn doubling_the_deformation_potential_quarters_tau() {
    let d = TempDir::new().unwrap();
    ok(&qdthz(d.path(), None, &["phonon", "--e10", "12"]));
    let a = report(d.path(), "phonon.json")["result"]["relaxation"]["tau_s"].as_f64().unwrap();
    let cfg = r#"{"phonon": {"environment": {"deformation_potential": 17.2}}}"#;
    ok(&qdthz(d.path(), Some(cfg), &["phonon", "--e10", "12"]));
    let b = report(d.path(), "phonon.json")["result"]["relaxation"]["tau_s"].as_f64().unwrap();
    assert!((a / b - 4.0).abs() < 1e-9);
}

#[test]
fn effective_kernel_through_the_cli() {
    let d = TempDir::new().unwrap();
    ok(&qdthz(d.path(), Some(FAST), &["cnot", "--effective-model", "--delta-t", "1e-6", "--mode", "kernel"]));
    let r = report(d.path(), "cnot.json");
    assert_eq!(r["config"]["gate"]["model"], "effective");
    assert_eq!(r["config"]["gate"]["plan"]["calibration"], "bare");
    let g = &r["result"]["gate"];
    assert!(g["fidelity"].as_f64().unwrap() > 1.0 - 1e-8);
    assert!(g["phase_errors"].as_array().unwrap().iter().all(|p| p.as_f64().unwrap().abs() < 0.05));
    assert_eq!(g["timing"].as_array().unwrap().len(), 3);
}
