use std::fs;
use std::path::Path;

use super::*;

const EXPSHIFT_LAN: &str = r#"
name = "expshift-lan"
seed = 20261018
reps = 40
n_grid = [100, 1000]

[model]
tag = "expshift"
theta = [0.0]

[[diagnostics]]
check = "lan"
t = [1.0]
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run_args(args: &[&str]) -> u8 {
    run(std::iter::once("semieff").chain(args.iter().copied()))
}

#[test]
fn config_round_trips_and_rejects_unknown_keys() {
    let cfg = ExperimentConfig::from_toml(EXPSHIFT_LAN).unwrap();
    assert_eq!(cfg.diagnostics, vec![DiagnosticSpec::Lan { t: vec![1.0] }]);
    let again = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(cfg, again);
    assert_eq!(cfg.hash().unwrap(), again.hash().unwrap());
    assert_eq!(cfg.hash().unwrap().len(), 64);

    let extra = format!("{EXPSHIFT_LAN}\nunexpected = 1\n");
    assert!(matches!(ExperimentConfig::from_toml(&extra), Err(Error::Config(_))));
    let nested = EXPSHIFT_LAN.replace("theta = [0.0]", "theta = [0.0]\ncolour = \"red\"");
    assert!(ExperimentConfig::from_toml(&nested).is_err());
    let bad_check = EXPSHIFT_LAN.replace("t = [1.0]", "t = [1.0]\nwidth = 2");
    assert!(ExperimentConfig::from_toml(&bad_check).is_err());
}

#[test]
fn full_config_round_trips() {
    let text = r#"
name = "cox"
seed = 7
reps = 10
n_grid = [400]
diagnostics = [{ check = "excess-variance" }, { check = "ecdf", distribution = "normal", t_grid = [0.0] }]

[model]
tag = "cox"
theta = [0.0, 1.0]
params = { z_mean = [1.0], z_var = [1.0] }

[pipeline]
preliminary = "moments"
discretize = true
mesh_c = 0.5
bandwidth = { fixed = { h = 0.3 } }

[output]
dir = "results"
stem = "cox-run"

[slack]
lan_slack = 0.2
"#;
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    assert_eq!(cfg.slack.lan_slack, 0.2);
    assert_eq!(cfg.slack.ks_alpha, 0.01);
    assert_eq!(cfg.output_file("report", "json"), Path::new("results/cox-run.report.json"));
    assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(), cfg);
}

#[test]
fn invalid_values_are_config_errors() {
    for (from, to) in [("reps = 40", "reps = 1"), ("n_grid = [100, 1000]", "n_grid = []")] {
        let text = EXPSHIFT_LAN.replace(from, to);
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(Error::Config(_))), "{to}");
    }
}

#[test]
fn bound_tables_match_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| -> Vec<(f64, f64)> {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.starts_with("# semieff "));
        assert!(text.contains("# config_sha256: ") && text.contains("# seed: "));
        let body: String = text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
        csv::Reader::from_reader(body.as_bytes())
            .records()
            .map(|r| {
                let r = r.unwrap();
                (r[0].parse().unwrap(), r[1].parse().unwrap())
            })
            .collect()
    };
    let out = dir.path().join("normal.csv");
    assert_eq!(run_args(&["bound", "--score", "normal", "--var", "1", "--out", out.to_str().unwrap()]), 0);
    let t = read("normal.csv");
    assert_eq!(t.len(), 99);
    for (u, k) in t {
        assert!((k - crate::numerics::stats::normal_quantile(u)).abs() < 1e-4);
    }

    let out = dir.path().join("vz.csv");
    assert_eq!(run_args(&["bound", "--family", "vanzwet", "--es2", "2", "--out", out.to_str().unwrap()]), 0);
    let t = read("vz.csv");
    assert_eq!(t.first().unwrap(), &(0.0, -1.0));
    assert!((t.last().unwrap().1 - 1.0).abs() < 1e-12);

    let out = dir.path().join("trig.csv");
    assert_eq!(run_args(&["bound", "--family", "trig", "--es2", "1", "--points", "3", "--out", out.to_str().unwrap()]), 0);
    let t = read("trig.csv");
    let (u, k) = t[3];
    assert_eq!(u, 0.75);
    assert!((k - std::f64::consts::FRAC_PI_6).abs() < 1e-4);
}

#[test]
fn bound_spec_errors_exit_2() {
    assert_eq!(run_args(&["bound", "--family", "trig"]), EXIT_CONFIG);
    assert_eq!(run_args(&["bound", "--family", "trig", "--es2=-1"]), EXIT_CONFIG);
    assert_eq!(run_args(&["bound"]), EXIT_CONFIG);
    assert_eq!(run_args(&["bound", "--score", "normal", "--family", "trig", "--var", "1"]), EXIT_CONFIG);
    assert_eq!(run_args(&["frobnicate"]), EXIT_CONFIG);
}

#[test]
fn check_exit_codes_follow_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = write_config(dir.path(), "lan.toml", EXPSHIFT_LAN);
    assert_eq!(run_args(&["check", "--config", cfg.to_str().unwrap(), "--out", out]), EXIT_DIAGNOSTIC_FAILED);
    // The report is written even though the check failed.
    let json = fs::read_to_string(dir.path().join("expshift-lan.report.json")).unwrap();
    assert!(json.contains("\"config_sha256\"") && json.contains("lan_check:expshift"));
    let csv = fs::read_to_string(dir.path().join("expshift-lan.report.csv")).unwrap();
    assert!(csv.starts_with("# semieff "));

    let ecdf = r#"
name = "ecdf"
seed = 20261018
reps = 2000
n_grid = [100]

[model]
tag = "location:normal"
theta = [0.0]

[[diagnostics]]
check = "ecdf"
distribution = "normal"
t_grid = [-1.0, 0.0, 1.0]
"#;
    let cfg = write_config(dir.path(), "ecdf.toml", ecdf);
    assert_eq!(run_args(&["check", "--config", cfg.to_str().unwrap(), "--out", out]), EXIT_OK);

    let empty = ecdf.split("[[diagnostics]]").next().unwrap().replace("\"ecdf\"", "\"empty\"");
    let cfg = write_config(dir.path(), "empty.toml", &empty);
    assert_eq!(run_args(&["check", "--config", cfg.to_str().unwrap(), "--out", out]), EXIT_OK);
    let json = fs::read_to_string(dir.path().join("empty.report.json")).unwrap();
    assert!(json.contains("\"verdicts\": []"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    assert_eq!(run_args(&["check", "--config", missing.to_str().unwrap()]), EXIT_CONFIG);
    let cfg = write_config(dir.path(), "bad.toml", &format!("{EXPSHIFT_LAN}\nbogus = true\n"));
    assert_eq!(run_args(&["estimate", "--config", cfg.to_str().unwrap()]), EXIT_CONFIG);
    let cfg = write_config(dir.path(), "model.toml", &EXPSHIFT_LAN.replace("expshift", "nosuchmodel"));
    assert_eq!(run_args(&["check", "--config", cfg.to_str().unwrap()]), EXIT_CONFIG);
    // expshift has no efficient influence function, so a one-step pipeline is rejected.
    let cfg = write_config(dir.path(), "est.toml", EXPSHIFT_LAN);
    assert_eq!(run_args(&["estimate", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]), EXIT_CONFIG);
}

const NORMAL_MEAN: &str = r#"
name = "normal-mean"
seed = 20261018
reps = 400
n_grid = [50]

[model]
tag = "location:normal"
theta = [1.0]

[pipeline]
estimator = "preliminary-only"
preliminary = "mean"
"#;

#[test]
fn estimate_is_deterministic_and_summarizes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "mean.toml", NORMAL_MEAN);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        assert_eq!(run_args(&["estimate", "--config", cfg.to_str().unwrap(), "--out", d.to_str().unwrap()]), 0);
    }
    for f in ["normal-mean.estimates.csv", "normal-mean.summary.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    let summary = fs::read_to_string(a.join("normal-mean.summary.csv")).unwrap();
    let body: String = summary.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let row = rdr.records().next().unwrap().unwrap();
    let var: f64 = row[4].parse().unwrap();
    // sigma^2 / n = 1 / 50.
    assert!((var - 0.02).abs() < 0.004, "{var}");
    assert!((row[6].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);

    // A different seed changes the estimates.
    let c = dir.path().join("c");
    run_args(&["estimate", "--config", cfg.to_str().unwrap(), "--seed", "1", "--out", c.to_str().unwrap()]);
    assert_ne!(
        fs::read(a.join("normal-mean.estimates.csv")).unwrap(),
        fs::read(c.join("normal-mean.estimates.csv")).unwrap()
    );
}

#[test]
fn runtime_errors_exit_3_with_replication_index() {
    let dir = tempfile::tempdir().unwrap();
    // Four-way splitting needs blocks of at least 50 observations.
    let text = NORMAL_MEAN
        .replace("estimator = \"preliminary-only\"\npreliminary = \"mean\"", "splitting = \"four-way\"\nscore = \"kernel\"");
    let cfg = write_config(dir.path(), "small.toml", &text);
    let cfg = ExperimentConfig::load(&cfg).unwrap();
    match run_estimate(&cfg) {
        Err(e @ Error::Replication { index: 0, .. }) => assert_eq!(exit_code(&e), EXIT_RUNTIME),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn ar1_estimates_run() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
name = "ar"
seed = 20261018
reps = 20
n_grid = [800]

[model]
tag = "ar1"
theta = [0.5]
params = { errors = "laplace-unit" }
"#;
    let mut cfg = ExperimentConfig::from_toml(text).unwrap();
    cfg.output.dir = dir.path().to_path_buf();
    let files = run_estimate(&cfg).unwrap();
    assert_eq!(files.len(), 2);
    let summary = fs::read_to_string(&files[1]).unwrap();
    // Bound (1 - rho^2) / (I sigma^2) = 0.75 / 2.
    assert!(summary.contains(",0.375,"), "{summary}");
    cfg.diagnostics.push(DiagnosticSpec::ExcessVariance);
    assert!(matches!(run_check(&cfg), Err(Error::Config(_))));
}

#[test]
fn list_models_exits_0() {
    assert_eq!(run_args(&["list-models"]), 0);
    assert_eq!(run_args(&["list-models", "--json"]), 0);
}
