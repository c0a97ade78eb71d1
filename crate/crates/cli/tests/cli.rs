//! End-to-end checks of the command-line surface: exit codes, CSV
//! determinism, and the agreement report.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hoplab")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hoplab_cli_{tag}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const MINI: &str = r#"
methods = ["exact", "asymptotic", "mc"]

[scenario]
name = "mini"

[chain]
hops = 2
beta = 2.0
total_distance_m = 300.0
bandwidth_mhz = 200.0
eirp_dbm = 23.0

[sweep]
variable = "eirp_dbm"
start = 10.0
stop = 40.0
points = 4

[[metric]]
kind = "outage"
gamma_th_db = 0.0

[mc]
trials = 20000
seed = 11
"#;

#[test]
fn run_writes_deterministic_csv() {
    let dir = temp_dir("run");
    let scenario = write_scenario(&dir, "mini.toml", MINI);
    let out1 = dir.join("a");
    let out2 = dir.join("b");
    for out in [&out1, &out2] {
        let status = Command::new(bin())
            .args(["run", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(out1.join("mini_outage_th0db.csv")).unwrap();
    let b = std::fs::read(out2.join("mini_outage_th0db.csv")).unwrap();
    assert_eq!(a, b, "same seed must produce byte-identical CSV");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("eirp_dbm,exact,asymptotic,mc,mc_half_width\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn seed_override_changes_mc_column() {
    let dir = temp_dir("seed");
    let scenario = write_scenario(&dir, "mini.toml", MINI);
    let out1 = dir.join("a");
    let out2 = dir.join("b");
    for (out, seed) in [(&out1, "11"), (&out2, "12")] {
        let status = Command::new(bin())
            .args([
                "run",
                scenario.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--seed",
                seed,
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read_to_string(out1.join("mini_outage_th0db.csv")).unwrap();
    let b = std::fs::read_to_string(out2.join("mini_outage_th0db.csv")).unwrap();
    assert_ne!(a, b);
    // Exact columns still identical.
    for (la, lb) in a.lines().zip(b.lines()).skip(1) {
        assert_eq!(la.split(',').nth(1), lb.split(',').nth(1));
    }
}

#[test]
fn parse_error_exits_2() {
    let dir = temp_dir("parse");
    let bad = write_scenario(&dir, "bad.toml", "this is not toml [ at all");
    let status = Command::new(bin())
        .args(["run", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let missing = dir.join("nonexistent.toml");
    let status = Command::new(bin())
        .args(["run", missing.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn invalid_modulation_exits_3() {
    let dir = temp_dir("validate");
    let body = MINI.replace(
        "kind = \"outage\"\ngamma_th_db = 0.0",
        "kind = \"ber\"\nmodulation = 8",
    );
    let bad = write_scenario(&dir, "m8.toml", &body);
    let out = Command::new(bin())
        .args(["run", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("modulation"), "stderr: {stderr}");
}

#[test]
fn report_on_healthy_run_exits_0() {
    let dir = temp_dir("report");
    let scenario = write_scenario(&dir, "mini.toml", MINI);
    let out = dir.join("csvs");
    assert!(Command::new(bin())
        .args(["run", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let status = Command::new(bin()).args(["report", out.to_str().unwrap()]).status().unwrap();
    assert!(status.success());
    // Empty directory errors with the validation exit code.
    let empty = dir.join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let status = Command::new(bin()).args(["report", empty.to_str().unwrap()]).output().unwrap();
    assert_eq!(status.status.code(), Some(3));
}

#[test]
fn selftest_passes() {
    let out = Command::new(bin()).arg("selftest").output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[PASS] fox_h exp identity"), "stdout: {stdout}");
    assert!(!stdout.contains("[FAIL]"));
}

#[test]
fn methods_override_drops_columns() {
    let dir = temp_dir("methods");
    let scenario = write_scenario(&dir, "mini.toml", MINI);
    let out = dir.join("csvs");
    assert!(Command::new(bin())
        .args([
            "run",
            scenario.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--methods",
            "exact",
        ])
        .status()
        .unwrap()
        .success());
    let text = std::fs::read_to_string(out.join("mini_outage_th0db.csv")).unwrap();
    assert!(text.starts_with("eirp_dbm,exact\n"));
}
