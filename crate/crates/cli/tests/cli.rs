use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use insightrank_core::synthetic;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_insightrank"))
}

fn weather_csv(dir: &Path) -> PathBuf {
    let path = dir.join("weather.csv");
    std::fs::write(&path, synthetic::to_csv(&synthetic::weather(200, 11))).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn json_report_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let csv = weather_csv(dir.path());
    let out = run(&[
        "analyze",
        csv.to_str().unwrap(),
        "--format",
        "json",
        "--top-r",
        "4",
        "--top-k",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dataset"], "weather");
    assert_eq!(v["top_r"], 4);
    assert_eq!(v["config_fingerprint"].as_str().unwrap().len(), 16);
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows.is_empty() && rows.len() <= 4);
    for row in rows {
        assert!(row["psi"].is_f64());
        for ins in row["insights"].as_array().unwrap() {
            for key in ["combination", "phi", "score", "chart", "annotations"] {
                assert!(!ins[key].is_null(), "missing {key}");
            }
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let csv = weather_csv(dir.path());
    let args = ["analyze", csv.to_str().unwrap(), "--seed", "42"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unknown_filter_column_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let csv = weather_csv(dir.path());
    let out = run(&["analyze", csv.to_str().unwrap(), "--filter", "temp,nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn missing_file_exits_1() {
    let out = run(&["analyze", "/definitely/not/here.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let csv = weather_csv(dir.path());
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, r#"{"penalty_lambda": 3.0}"#).unwrap();
    let out = run(&["analyze", csv.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(&cfg, r#"{"methods": {"dbscan": {"min_pts": -1}}}"#).unwrap();
    let out = run(&["analyze", csv.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["analyze", csv.to_str().unwrap(), "--top-k", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn markdown_follows_json_row_order() {
    let dir = tempfile::tempdir().unwrap();
    let csv = weather_csv(dir.path());
    let json = run(&["analyze", csv.to_str().unwrap(), "--format", "json"]);
    let md = run(&["analyze", csv.to_str().unwrap(), "--format", "markdown"]);
    assert!(md.status.success());
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let md = String::from_utf8(md.stdout).unwrap();
    let names: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["display_name"].as_str().unwrap())
        .collect();
    let positions: Vec<usize> = names
        .iter()
        .map(|n| md.find(&format!(". {n} (Ψ")).unwrap_or_else(|| panic!("{n} missing")))
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
    assert!(md.contains("| # | attributes |"));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = weather_csv(dir.path());
    let target = dir.path().join("report.json");
    let out = run(&["analyze", csv.to_str().unwrap(), "-o", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert!(v["rows"].is_array());
}

#[test]
fn single_categorical_column_reports_empty() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let body: String = std::iter::once("g\n".to_string())
        .chain((0..40).map(|i| format!("{}\n", ["a", "b"][i % 2])))
        .collect();
    std::fs::write(&csv, body).unwrap();
    let out = run(&["analyze", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["empty"], true);
    let md = run(&["analyze", csv.to_str().unwrap(), "--format", "markdown"]);
    assert!(String::from_utf8_lossy(&md.stdout).contains("No insights found."));
}
