//! End-to-end checks of the binary: config handling, exit codes, schemas,
//! and byte-identical re-runs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_txcorr")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("txcorr-cli-test-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

#[test]
fn figure1_row_count_and_schema() {
    let dir = tmp_dir("fig1");
    let cfg = write_config(
        &dir,
        "f1.json",
        r#"{"command": "figure1", "parameters": {"tc_list": [32], "g_list": [1, 4], "min_mk_max": 8}, "output_path": "fig1.csv"}"#,
    );
    let out_path = dir.join("fig1.csv");
    let out = run(&["--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "min_mk,tc,g,prelog");
    assert_eq!(lines.len(), 1 + 2 * 8, "1 Tc x 2 G x 8 grid rows");
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("wrote 16 rows"), "summary was: {summary}");
}

#[test]
fn unknown_field_is_rejected_with_exit_2() {
    let dir = tmp_dir("strict");
    let cfg = write_config(
        &dir,
        "bad.json",
        r#"{"command": "figure6", "parameters": {"alpha": 10.0, "nonsense": 3}, "output_path": "x.csv"}"#,
    );
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nonsense"), "error should name the field: {err}");

    let cfg2 = write_config(&dir, "bad2.json", r#"{"command": "no_such_thing"}"#);
    let out2 = run(&["--config", cfg2.to_str().unwrap()]);
    assert_eq!(out2.status.code(), Some(2));

    // top-level unknown keys are rejected too
    let cfg3 = write_config(
        &dir,
        "bad3.json",
        r#"{"command": "figure1", "outputs": "y.csv"}"#,
    );
    let out3 = run(&["--config", cfg3.to_str().unwrap()]);
    assert_eq!(out3.status.code(), Some(2));
}

#[test]
fn missing_output_path_is_a_config_error() {
    let dir = tmp_dir("noout");
    let cfg = write_config(&dir, "f.json", r#"{"command": "figure1"}"#);
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn monte_carlo_rerun_is_byte_identical() {
    let dir = tmp_dir("det");
    let cfg = write_config(
        &dir,
        "f4.json",
        r#"{"command": "figure4", "parameters": {"trials": 30, "k_list": [4], "snr_grid_db": [10.0]}, "seed": 7, "output_path": "f4.csv"}"#,
    );
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    let out1 = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        a.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert!(out1.status.success(), "{}", String::from_utf8_lossy(&out1.stderr));
    let out2 = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
        "--threads",
        "8",
    ]);
    assert!(out2.status.success());
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "threads 1 vs 8 must agree byte for byte");
    assert!(!bytes_a.contains(&b'\r'), "LF line endings only");
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tmp_dir("seed");
    let cfg = write_config(
        &dir,
        "f4.json",
        r#"{"command": "figure4", "parameters": {"trials": 20, "k_list": [4], "snr_grid_db": [10.0]}, "seed": 7, "output_path": "f4.csv"}"#,
    );
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    run(&["--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    run(&["--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap(), "--seed", "8"]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn covariance_json_round_trips() {
    let dir = tmp_dir("cov");
    let cfg = write_config(
        &dir,
        "cov.json",
        r#"{"command": "covariance", "parameters": {"m": 6, "theta_deg": 15.0, "delta_deg": 8.0}, "format": "json", "output_path": "cov.out"}"#,
    );
    let out_path = dir.join("cov.out");
    let out = run(&["--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["m"], 6);
    assert_eq!(v["lags"].as_array().unwrap().len(), 6);
    assert_eq!(v["lags"][0][0], 1.0);
    // the library accepts its own emission
    let r = txcorr::covariance::CorrelationMatrix::from_json(&text).unwrap();
    assert_eq!(r.m(), 6);
}

#[test]
fn figure3_marks_the_argmax_once() {
    let dir = tmp_dir("fig3");
    let cfg = write_config(
        &dir,
        "f3.json",
        r#"{"command": "figure3", "output_path": "f3.csv"}"#,
    );
    let out_path = dir.join("f3.csv");
    let out = run(&["--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "q,f_q,is_optimal");
    let marks = lines.filter(|l| l.ends_with(",1")).count();
    assert_eq!(marks, 1, "exactly one optimum marker");
}

#[test]
fn json_format_renders_table() {
    let dir = tmp_dir("json");
    let cfg = write_config(
        &dir,
        "f6.json",
        r#"{"command": "figure6", "parameters": {"k_max": 20, "k_step": 5}, "output_path": "f6.json", "format": "json"}"#,
    );
    let out_path = dir.join("f6.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["columns"], serde_json::json!(["k", "regime", "dof"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}
