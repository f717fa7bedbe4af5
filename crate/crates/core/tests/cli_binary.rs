//! End-to-end runs of the `semieff` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_semieff");

const KERNEL_LOCATION: &str = r#"
name = "kernel-location"
seed = 20261018
reps = 24
n_grid = [400]

[model]
tag = "location:normal"
theta = [0.5]

[pipeline]
splitting = "four-way"
score = "kernel"
"#;

fn semieff(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("SEMIEFF_THREADS");
    if let Some(t) = threads {
        cmd.env("SEMIEFF_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn list_models_prints_table_and_json() {
    let o = semieff(&["list-models"], None);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for tag in ["location:normal", "expshift", "cox"] {
        assert!(text.contains(tag), "missing {tag}");
    }
    let o = semieff(&["list-models", "--json"], None);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn bound_writes_csv_to_stdout() {
    let o = semieff(&["bound", "--family", "uniform", "--abs-moment", "0.5", "--points", "3"], None);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let (u, k) = l.split_once(',').unwrap();
            (u.parse().unwrap(), k.parse().unwrap())
        })
        .collect();
    // (u - 1/2) / E|S| on u = 0, 1/4, 1/2, 3/4, 1.
    assert_eq!(rows.len(), 5);
    for (u, k) in rows {
        assert!((k - (u - 0.5) / 0.5).abs() < 1e-12, "u={u} k={k}");
    }
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "k.toml", KERNEL_LOCATION);
    let mut runs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("t{threads}"));
        let o = semieff(&["estimate", "--config", &cfg, "--out", out.to_str().unwrap()], Some(threads));
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        runs.push((
            fs::read(out.join("kernel-location.estimates.csv")).unwrap(),
            fs::read(out.join("kernel-location.summary.csv")).unwrap(),
        ));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn bad_thread_count_and_bad_config_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "k.toml", KERNEL_LOCATION);
    let o = semieff(&["estimate", "--config", &cfg], Some("0"));
    assert_eq!(code(&o), 2);
    let bad = write(dir.path(), "bad.toml", &KERNEL_LOCATION.replace("reps = 24", "reps = 24\nrepz = 1"));
    let o = semieff(&["estimate", "--config", &bad], None);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("repz"));
}

#[test]
fn failing_diagnostic_exits_1_and_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "lan.toml",
        r#"
name = "shift"
seed = 20261018
reps = 30
n_grid = [100, 1000]

[model]
tag = "expshift"
theta = [0.0]

[[diagnostics]]
check = "lan"
t = [-1.0]
"#,
    );
    let out = dir.path().join("out");
    let o = semieff(&["check", "--config", &cfg, "--out", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(out.join("shift.report.json")).unwrap()).unwrap();
    assert_eq!(v["header"]["seed"], 20261018);
    let verdicts = v["report"]["verdicts"].as_array().unwrap();
    assert!(verdicts.iter().any(|x| x["passed"] == false));
}

#[test]
fn runtime_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // Four-way splitting cannot form blocks from 40 observations.
    let cfg = write(dir.path(), "small.toml", &KERNEL_LOCATION.replace("n_grid = [400]", "n_grid = [40]"));
    let o = semieff(&["estimate", "--config", &cfg, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("replication 0"));
}
