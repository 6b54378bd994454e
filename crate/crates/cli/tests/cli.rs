use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gpscat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpscat"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_kind(out: &Output) -> String {
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    let line = stderr
        .lines()
        .find(|l| l.starts_with("{\"error\""))
        .unwrap_or_else(|| panic!("no JSON error in {stderr:?}"));
    let doc: Value = serde_json::from_str(line).unwrap();
    doc["error"]["kind"].as_str().unwrap().to_string()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64()
        .or_else(|| v.to_string().parse().ok())
        .unwrap_or_else(|| panic!("{v} is not a number"))
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn key_values(csv: &str) -> Vec<(String, String)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn lookup(kv: &[(String, String)], key: &str) -> f64 {
    kv.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.parse().unwrap())
        .unwrap_or_else(|| panic!("no {key}"))
}

#[test]
fn sigma_solves_the_reflectance() {
    let out = gpscat(&["sigma", "--db", "5", "--solve-r"]);
    assert!(out.status.success());
    let kv = key_values(&stdout(&out));
    assert!((lookup(&kv, "reflectance") - 0.240).abs() < 5e-4);
    assert!((lookup(&kv, "sigma_11") - 1.0).abs() < 1e-12);
    let det = lookup(&kv, "det");
    let (a, b, c) = (
        lookup(&kv, "sigma_inv_11"),
        lookup(&kv, "sigma_inv_12"),
        lookup(&kv, "sigma_inv_22"),
    );
    assert!((a * c - b * b - 1.0 / det).abs() < 1e-12);

    let out = gpscat(&["sigma", "--db", "15"]);
    let kv = key_values(&stdout(&out));
    assert!((lookup(&kv, "reflectance") - 0.0307).abs() < 1e-4);
}

#[test]
fn sigma_without_solution_exits_with_two() {
    let out = gpscat(&["sigma", "--r1", "0.3", "--r2", "0.3", "--solve-r"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "NoSolution");
    assert!(out.stdout.is_empty());
}

#[test]
fn negative_squeezing_is_accepted() {
    let out = gpscat(&[
        "sigma", "--r1", "0.576", "--r2", "-0.576", "--format", "json",
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(num(&doc["meta"]["r2"]), -0.576);
    assert_eq!(doc["meta"]["solved"], Value::Bool(true));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["sigma", "--db", "5", "--r1", "1", "--r2", "-1"],
        vec!["sigma", "--reflectance", "1.5"],
        vec!["sweep", "--grid", "3:1:0.5"],
        vec!["sweep", "--methods", "gps,telepathy"],
        vec!["frobnicate"],
    ] {
        let out = gpscat(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(error_kind(&out), "Usage", "{args:?}");
    }
}

#[test]
fn wavefunction_sidecar_reports_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wf.csv");
    let out = gpscat(&[
        "wavefunction",
        "--db",
        "5",
        "--n",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["x", "psi_n", "target_cat", "abs_err"]);
    assert_eq!(rows.len(), 1201);
    let meta = read_json(&dir.path().join("wf.csv.json"));
    assert!((num(&meta["fidelity"]) - 0.997).abs() < 0.002);
    assert_eq!(meta["closed_form"], Value::Bool(true));
    assert_eq!(meta["oscillates"], Value::Bool(false));
    assert!((num(&meta["norm"]) - 1.0).abs() < 1e-8);
}

#[test]
fn vacuum_herald_is_a_single_peak() {
    let out = gpscat(&["wavefunction", "--n", "0", "--grid=-4:4:0.05"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let psi: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let top = psi
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    assert_eq!(top, psi.len() / 2);
    assert!(psi[..=top].windows(2).all(|w| w[0] <= w[1]));
    assert!(psi[top..].windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn large_sigma11_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wf.csv");
    let out = gpscat(&[
        "wavefunction",
        "--db",
        "5",
        "--reflectance",
        "0.3808",
        "--momentum",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (header, _) = read_csv(&path);
    assert_eq!(header[4..], ["p", "abs_psi_tilde"]);
    let meta = read_json(&dir.path().join("wf.csv.json"));
    assert!(num(&meta["oscillation"]) > 0.05);
    assert_eq!(meta["oscillates"], Value::Bool(true));
    assert_eq!(meta["closed_form"], Value::Bool(false));
    assert_eq!(meta["reflectance_source"], "override");
}

#[test]
fn sweep_reproduces_the_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = gpscat(&[
        "sweep",
        "--grid",
        "0:15:5",
        "--n",
        "2,10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&path);
    assert_eq!(rows.len(), 4);
    let value = |row: &[String], name: &str| -> f64 { row[column(&header, name)].parse().unwrap() };
    for name in ["p_gps_2", "p_gps_10", "p_homodyne_10", "p_conventional_10"] {
        assert_eq!(value(&rows[0], name), 0.0, "{name}");
    }
    assert!((value(&rows[3], "p_gps_10") - 0.023).abs() < 0.001);
    assert!((value(&rows[3], "rate_gps_10") - 2.3e6).abs() < 0.1e6);
    let ratio = value(&rows[2], "ratio_gps_conv_10");
    assert!(ratio >= 1e3, "{ratio}");
    assert_eq!(
        ratio,
        value(&rows[2], "p_gps_10") / value(&rows[2], "p_conventional_10")
    );
    assert!(rows.iter().all(|r| r.last().unwrap().is_empty()));
    let meta = read_json(&dir.path().join("sweep.csv.json"));
    assert_eq!(meta["points"], 4);
    assert_eq!(meta["failed_cells"], 0);
}

#[test]
fn sweep_flags_truncated_points() {
    let out = gpscat(&[
        "sweep",
        "--grid",
        "10:20:10",
        "--n",
        "4",
        "--methods",
        "conventional",
        "--nmax",
        "30",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    assert!(last.ends_with("conventional:4:TruncationError"), "{last}");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = gpscat(&[
            "sweep",
            "--grid",
            "0.5:12:0.5",
            "--n",
            "3,7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        (
            std::fs::read(&path).unwrap(),
            std::fs::read(dir.path().join(format!("{name}.json"))).unwrap(),
        )
    };
    let (a, a_meta) = run("a.csv");
    let (b, b_meta) = run("b.csv");
    assert_eq!(a, b);
    assert_eq!(a_meta, b_meta);
}

#[test]
fn numbers_carry_seventeen_digits() {
    let out = gpscat(&["sigma", "--db", "7.5"]);
    for (_, v) in key_values(&stdout(&out)) {
        if v.parse::<f64>().is_err() {
            continue;
        }
        if let Some((mantissa, _)) = v.split_once('e') {
            let digits = mantissa.chars().filter(char::is_ascii_digit).count();
            assert_eq!(digits, 17, "{v}");
        }
    }
}

#[test]
fn default_validation_passes() {
    let out = gpscat(&["validate", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["meta"]["passed"], doc["meta"]["checks"]);
    for row in doc["rows"].as_array().unwrap() {
        assert_eq!(row["status"], "pass", "{row}");
    }
}

#[test]
fn validation_reports_truncation_separately() {
    let out = gpscat(&[
        "validate", "--suite", "oracle", "--db", "15", "--nmax", "20", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "ValidationFailed");
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    let truncated: Vec<&Value> = rows
        .iter()
        .filter(|r| r["error"] == "TruncationError")
        .collect();
    assert!(!truncated.is_empty());
    assert!(truncated.iter().all(|r| r["status"] == "error"));
}

#[test]
fn oracle_suite_reports_the_residual() {
    let out = gpscat(&["validate", "--suite", "oracle", "--db", "10", "--n", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text
        .lines()
        .find(|l| l.contains("probability_agreement"))
        .unwrap();
    let value: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!(value < 1e-5);
}

#[test]
fn help_documents_the_columns() {
    let out = gpscat(&["sweep", "--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("p_<method>_<n>"));
    assert!(text.contains("ratio_gps_conv_<n>"));
}
