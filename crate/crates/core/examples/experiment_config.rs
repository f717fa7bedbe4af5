//! Declarative experiments: parse a config, run its diagnostics and write reports.
//!
//! Run with `cargo run --release --example experiment_config`.

use semieff::cli::{run_check, run_estimate, ExperimentConfig};

const CONFIG: &str = r#"
name = "laplace-location"
seed = 20261018
reps = 200
n_grid = [400]

[model]
tag = "location:laplace"
theta = [0.0]

[pipeline]
preliminary = "m-estimator"
discretize = true
splitting = "two-way"

[[diagnostics]]
check = "lan"
t = [1.0]

[[diagnostics]]
check = "las-spread"
direction = [1.0]

[[diagnostics]]
check = "excess-variance"
"#;

fn main() -> semieff::Result<()> {
    let mut cfg = ExperimentConfig::from_toml(CONFIG)?;
    cfg.output.dir = std::env::temp_dir().join("semieff-example");
    println!("config hash {}", cfg.hash()?);
    println!("{}", cfg.to_toml()?);

    for f in run_estimate(&cfg)? {
        println!("wrote {}", f.display());
    }
    let out = run_check(&cfg)?;
    for v in &out.report.verdicts {
        println!("{:<60} passed {:<5} margin {:.4}", v.check, v.passed, v.margin);
    }
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
