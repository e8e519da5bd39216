use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn szego(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_szego")).args(args).output().expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, json: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const EXP: &str = r#"{"exp_of": {"-1": [0.3, 0.0], "1": [0.2, 0.0]}, "radius": 32}"#;

#[test]
fn factor_constant_symbol() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"symbol": {"laurent": {"0": [4.0, 0.0]}}}"#);
    let v = stdout_json(&szego(&["factor", "--config", &cfg]));
    assert!((v["G"][0].as_f64().unwrap() - 4.0).abs() < 1e-14);
    assert!((v["E"][0].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert!(v["residual"].as_f64().unwrap() < 1e-14);
}

#[test]
fn factor_exp_symbol_in_both_precisions() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "e.json", &format!(r#"{{"symbol": {EXP}, "factor_radius": 32}}"#));
    for precision in ["f64", "mp"] {
        let v = stdout_json(&szego(&["factor", "--config", &cfg, "--precision", precision, "--radius", "2"]));
        assert!((v["G"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!((v["E"][0].as_f64().unwrap() - 0.06f64.exp()).abs() < 1e-12);
        assert_eq!(v["a_plus"].as_object().unwrap().len(), 3);
    }
}

#[test]
fn nonzero_index_is_a_math_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "i.json", &format!(r#"{{"symbol": {{"times_tk": {{"kappa": 1, "base": {EXP}}}}}}}"#));
    let out = szego(&["factor", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("index 1"));
}

#[test]
fn sweep_of_constant_one_has_zero_deltas() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "one.json", r#"{"symbol": {"laurent": {"0": [1.0, 0.0]}}, "n_list": [1, 2, 4]}"#);
    let csv_path = dir.path().join("one.csv");
    let out = szego(&["sweep", "--config", &cfg, "--out", csv_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(header, szego_cli::commands::CSV_HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert_eq!(row[5].parse::<f64>().unwrap(), 0.0);
        // 17 significant digits in scientific notation
        assert_eq!(row[1].split('e').next().unwrap().trim_start_matches('-').len(), 18);
    }
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("one.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["rows"], 3);
    assert_eq!(summary["hypotheses"]["class_w_phi"]["member"], true);
}

#[test]
fn sweep_with_winding_decreases() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "w.json",
        &format!(
            r#"{{"symbol": {EXP}, "kappa": 1, "n_list": [2, 4, 6, 8], "precision": "mp", "factor_radius": 32, "output": {{"format": "json"}}}}"#
        ),
    );
    let v = stdout_json(&szego(&["sweep", "--config", &cfg]));
    let normalized: Vec<f64> = v["rows"].as_array().unwrap().iter().map(|r| r["normalized_delta"].as_f64().unwrap()).collect();
    assert_eq!(normalized.len(), 4);
    assert!(normalized.windows(2).all(|w| w[1] < w[0]), "{normalized:?}");
    assert!(v["summary"]["fitted_exponent"].as_f64().unwrap() < -2.0);
}

#[test]
fn times_tk_shift_adds_to_kappa() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "t.json",
        &format!(
            r#"{{"symbol": {{"times_tk": {{"kappa": -1, "base": {EXP}}}}}, "n_list": [2, 3], "output": {{"format": "json"}}}}"#
        ),
    );
    let v = stdout_json(&szego(&["sweep", "--config", &cfg]));
    assert_eq!(v["summary"]["kappa"], -1);
}

#[test]
fn malformed_n_list_fails_before_computing() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.json", &format!(r#"{{"symbol": {EXP}, "n_list": [8, 4]}}"#));
    let out_path = dir.path().join("never.csv");
    let out = szego(&["sweep", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly increasing"));
    assert!(!Path::new(&out_path).exists());
    let out = szego(&["sweep", "--config", &cfg, "--n", "4,8", "--kappa", "-5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(szego(&["sweep"]).status.code(), Some(2));
}

#[test]
fn szego_table_converges() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "s.json", &format!(r#"{{"symbol": {EXP}, "n_list": [5, 10, 30]}}"#));
    let v = stdout_json(&szego(&["szego", "--config", &cfg]));
    let last = &v["rows"][2];
    assert!(last["rel_error"].as_f64().unwrap() < 1e-10);
    assert!((last["ratio_to_previous"][0].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn orlicz_check_reports_norms() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "o.json",
        r#"{"symbol": {"laurent": {"-2": [1.0, 0.0], "0": [2.0, 0.0], "3": [0.0, -1.0]}}, "n_list": [0, 1, 2, 3]}"#,
    );
    let v = stdout_json(&szego(&["orlicz-check", "--config", &cfg]));
    let fl = &v["fl_norm"];
    assert!((fl["wiener"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert!(fl["total"].as_f64().unwrap() > 4.0);
    assert!(v["complement_gap"].as_f64().unwrap() < 1e-9);
    let tails = v["tail_norms"].as_object().unwrap();
    assert_eq!(tails["3"].as_f64().unwrap(), 0.0);
    assert_eq!(v["hypotheses"]["reciprocal_sum"]["convergent"], true);
}

#[test]
fn verify_is_deterministic_and_passes() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out = szego(&["verify", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_with_zero_tolerance_reports_reproduction_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "z.json", r#"{"symbol": {"laurent": {}}, "tolerances": {"identity": 0.0}, "seed": 4}"#);
    let out = szego(&["verify", "--config", &cfg, "--suite", "identities"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().find(|l| l.starts_with("FAIL identities trial")).expect("failure line");
    let repro = line.split("reproduce: ").nth(1).unwrap();
    assert!(repro.starts_with("szego verify --seed 4 --suite identities --trial "));
    let trial = repro.rsplit(' ').next().unwrap();
    let single = szego(&["verify", "--config", &cfg, "--suite", "identities", "--trial", trial]);
    assert_eq!(single.status.code(), Some(1));
}
