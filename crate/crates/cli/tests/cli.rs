//! End-to-end runs of the installed binary: artifact layout, reproducibility,
//! flag/config precedence, and the error contract.

use serde_json::Value;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn phomol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phomol"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(dir: &Path, name: &str) -> Value {
    let text = std::fs::read_to_string(dir.join(name)).expect("artifact exists");
    serde_json::from_str(&text).expect("artifact is JSON")
}

#[test]
fn tc_artifacts_are_byte_reproducible() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = phomol(&["tc", "--out", dir.path().to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let json_a = std::fs::read(dir_a.path().join("tc.json")).unwrap();
    let json_b = std::fs::read(dir_b.path().join("tc.json")).unwrap();
    assert_eq!(json_a, json_b, "tc.json must reproduce byte for byte");
    let csv_a = std::fs::read(dir_a.path().join("tc_denominator_scan.csv")).unwrap();
    let csv_b = std::fs::read(dir_b.path().join("tc_denominator_scan.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "scan CSV must reproduce byte for byte");

    let summary = read_json(dir_a.path(), "tc.json");
    let asym = summary["asymptotic"]["t_c_kelvin"].as_f64().unwrap();
    let num = summary["numeric"]["t_c_kelvin"].as_f64().unwrap();
    assert!((asym - 0.0926564448863).abs() < 1e-9);
    assert!((num / asym - 1.0840).abs() < 1e-3);
    assert_eq!(summary["scan_rows"], 101);
}

#[test]
fn stdout_matches_the_json_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out = phomol(&["gate", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let file = std::fs::read(dir.path().join("gate.json")).unwrap();
    assert_eq!(out.stdout, file);
}

#[test]
fn unknown_config_key_is_rejected_with_error_json() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg, "not_a_real_key = 1.0").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = phomol(&[
        "tc",
        "--config",
        cfg.path().to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert!(err["error"]
        .as_str()
        .unwrap()
        .contains("unknown config key"));
}

#[test]
fn flags_override_config_file_values() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg, "x_min = 2.0\ntemperature_kelvin = 0.2").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = phomol(&[
        "tc",
        "--config",
        cfg.path().to_str().unwrap(),
        "--x-min",
        "1.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(dir.path(), "tc.json");
    assert_eq!(summary["config"]["x_min"].as_f64().unwrap(), 1.5);
    assert_eq!(
        summary["config"]["temperature_kelvin"].as_f64().unwrap(),
        0.2
    );
    assert_eq!(summary["numeric"]["x_min"].as_f64().unwrap(), 1.5);
}

#[test]
fn zero_coupling_scan_is_identically_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = phomol(&[
        "tmatrix-scan",
        "--v-over-ve",
        "0",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(dir.path(), "tmatrix_scan.json");
    let rows = summary["scan"].as_array().unwrap();
    assert_eq!(rows.len(), 201);
    for row in rows {
        assert_eq!(row["t_re"].as_f64().unwrap(), 0.0);
        assert_eq!(row["t_im"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn gate_defaults_to_the_crossing_phase() {
    let dir = tempfile::tempdir().unwrap();
    let out = phomol(&["gate", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let summary = read_json(dir.path(), "gate.json");
    assert!((summary["theta_over_pi"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    // |11> picks up e^{-i pi} = -1; the other basis states are untouched.
    let table = summary["truth_table"].as_array().unwrap();
    assert_eq!(table[3]["input"], "|11>");
    let out11 = table[3]["output"].as_array().unwrap();
    assert!((out11[3][0].as_f64().unwrap() + 1.0).abs() < 1e-12);
    for idx in 0..3 {
        let row = table[idx]["output"].as_array().unwrap();
        assert_eq!(row[idx][0].as_f64().unwrap(), 1.0);
        assert_eq!(row[idx][1].as_f64().unwrap(), 0.0);
    }
    assert!(summary["cnot_conjugation_max_deviation"].as_f64().unwrap() < 1e-12);
}

#[test]
fn keldysh_check_reports_residuals_within_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let out = phomol(&["keldysh-check", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(dir.path(), "keldysh_check.json");
    assert_eq!(summary["all_within"], true);
    assert!(summary["detailed_balance_max_rel"].as_f64().unwrap() <= 1e-12);
    assert!(summary["hilbert_max_rel_outside_5eta"].as_f64().unwrap() <= 1e-3);
    assert!(summary["causality_leak"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn molecule_csvs_embed_the_config_echo() {
    let dir = tempfile::tempdir().unwrap();
    let out = phomol(&["molecule", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("molecule_chi.csv")).unwrap();
    let comment_lines: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(comment_lines.iter().any(|l| l.contains("molecule_kappa = 2")));
    let mut data = text.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(data.next(), Some("x,re,im"));
    let rows: Vec<&str> = data.collect();
    assert_eq!(rows.len(), 128);
    for field in rows[0].split(',') {
        field.parse::<f64>().unwrap();
    }

    let summary = read_json(dir.path(), "molecule.json");
    assert!((summary["norm_squared"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(summary["parseval_abs_error"].as_f64().unwrap() < 1e-10);
    assert!(
        summary["direct_vs_momentum_sum_max_dev"].as_f64().unwrap() < 1e-10,
        "constructions disagree"
    );
}

#[test]
fn invalid_parameter_produces_typed_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = phomol(&[
        "tc",
        "--x-min",
        "-1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert_eq!(err["kind"], "InvalidParameter");
}

#[test]
fn ordinary_frequency_interpretation_scales_the_band() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let out = phomol(&["tc", "--out", dir_a.path().to_str().unwrap()]);
    assert!(out.status.success());
    let out = phomol(&["tc", "--ordinary", "--out", dir_b.path().to_str().unwrap()]);
    assert!(out.status.success());
    let angular = read_json(dir_a.path(), "tc.json");
    let ordinary = read_json(dir_b.path(), "tc.json");
    assert_eq!(ordinary["config"]["angular"], false);
    let ratio = ordinary["asymptotic"]["t_c_kelvin"].as_f64().unwrap()
        / angular["asymptotic"]["t_c_kelvin"].as_f64().unwrap();
    assert!((ratio - 2.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn usage_errors_emit_json_and_exit_2() {
    let out = phomol(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert_eq!(err["kind"], "Usage");
}
