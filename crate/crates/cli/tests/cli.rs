use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn jhj(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jhj"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .env_remove("JHJ_THREADS")
        .output()
        .unwrap()
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn limiter_reduce_reports_the_effective_limiter() {
    let tmp = tempfile::tempdir().unwrap();
    let o = jhj(&["limiter", "reduce"], &configs().join("limiter.toml"), tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("limiter.csv")).unwrap();
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(row[0], 0.0);
    assert!((row[1] - (3f64.sqrt() - 1.0).powi(2)).abs() < 1e-9, "{}", row[1]);
    assert_eq!(manifest(tmp.path())["status"], "ok");
}

#[test]
fn solve_writes_snapshots_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let o = jhj(&["solve"], &configs().join("solve.toml"), tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(tmp.path());
    assert_eq!(m["outputs"].as_array().unwrap().len(), 4);
    assert_eq!(m["times"].as_array().unwrap().last().unwrap().as_f64(), Some(0.5));
    assert_eq!(m["seed"], 7);
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    for k in 0..4 {
        assert!(tmp.path().join(format!("snapshot_{k:03}.csv")).exists());
    }
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = configs().join("solve.toml");
    assert!(jhj(&["solve", "--threads", "1"], &cfg, a.path()).status.success());
    assert!(jhj(&["solve", "--threads", "4"], &cfg, b.path()).status.success());
    assert_eq!(csv_files(a.path()), csv_files(b.path()));

    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = configs().join("vtf.toml");
    assert!(jhj(&["vtf", "check"], &cfg, a.path()).status.success());
    assert!(jhj(&["vtf", "check"], &cfg, b.path()).status.success());
    assert_eq!(csv_files(a.path()), csv_files(b.path()));
}

#[test]
fn seed_changes_the_sample() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = configs().join("vtf.toml");
    assert!(jhj(&["vtf", "check", "--seed", "1"], &cfg, a.path()).status.success());
    assert!(jhj(&["vtf", "check", "--seed", "2"], &cfg, b.path()).status.success());
    assert_ne!(fs::read(a.path().join("vtf_check.csv")).unwrap(), fs::read(b.path().join("vtf_check.csv")).unwrap());
    assert_eq!(manifest(b.path())["seed"], 2);
}

#[test]
fn vtf_check_residuals_are_small() {
    let tmp = tempfile::tempdir().unwrap();
    let o = jhj(&["vtf", "check"], &configs().join("vtf.toml"), tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = &manifest(tmp.path())["summary"];
    assert!(s["max_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(s["max_diagonal_defect"].as_f64(), Some(0.0));
    assert!(tmp.path().join("superlinearity.csv").exists());
}

#[test]
fn ishii_compare_orders_the_solutions() {
    let tmp = tempfile::tempdir().unwrap();
    let o = jhj(&["ishii", "compare"], &configs().join("ishii.toml"), tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("limiters.csv")).unwrap();
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!(row[0] <= row[2] && row[2] <= row[3]);
    assert!(manifest(tmp.path())["max_gap"].as_f64().unwrap() > 0.0);
}

#[test]
fn hopf_lax_oracle_accepts_json() {
    let tmp = tempfile::tempdir().unwrap();
    let o = jhj(&["oracle", "hopf-lax"], &configs().join("hopf_lax.json"), tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("hopf_lax.csv")).unwrap();
    assert!(csv.contains("\n0.5,0.15625\n"), "{csv}");
}

#[test]
fn misspelled_family_exits_with_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    let text = fs::read_to_string(configs().join("solve.toml"))
        .unwrap()
        .replace("family = \"anisotropic\"", "family = \"anisotropik\"");
    fs::write(&cfg, text).unwrap();
    let out = tmp.path().join("out");
    let o = jhj(&["solve"], &cfg, &out);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["path"], "hamiltonians[1].family");
    assert_eq!(err["error"]["kind"], "config");
    let m = manifest(&out);
    assert_eq!(m["status"], "error");
    assert_eq!(m["error"]["path"], "hamiltonians[1].family");
}

#[test]
fn snapshot_past_final_time_exits_with_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    let text = fs::read_to_string(configs().join("solve.toml")).unwrap().replace("[0.1, 0.25, 0.5]", "[0.1, 0.75]");
    fs::write(&cfg, text).unwrap();
    let o = jhj(&["solve"], &cfg, tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(manifest(tmp.path())["error"]["path"], "time.snapshots[1]");
}

#[test]
fn missing_config_file_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = jhj(&["solve"], &tmp.path().join("nope.toml"), tmp.path());
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(manifest(tmp.path())["error"]["kind"], "io");
}
