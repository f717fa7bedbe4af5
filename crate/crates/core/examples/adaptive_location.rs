//! Adaptive estimation of a symmetric centre with unknown error density,
//! using four-way sample splitting and a kernel score estimate.
//!
//! Run with `cargo run --release --example adaptive_location`.

use std::sync::Arc;

use semieff::diagnostics::replicate;
use semieff::estimators::{
    EstimatorKind, EstimatorPipeline, FittedScore, PipelineConfig, PreliminaryKind, ScoreEstimator, ScoreKind,
    Splitting,
};
use semieff::models::{LocationFamily, LocationModel, ParametricModel};
use semieff::numerics::stats;
use semieff::RngStream;

fn main() -> semieff::Result<()> {
    // A fitted score next to the true one.
    let g = LocationFamily::logistic();
    let mut rng = RngStream::new(20261018, 3);
    let eps: Vec<f64> = (0..4000).map(|_| g.sample(&mut rng)).collect();
    let est = ScoreEstimator::symmetric_location();
    let f: FittedScore = est.fit_residuals(&eps)?;
    println!("bandwidth {:.3}, clamp {:.2}, I-hat {:.3} (true {:.3})", f.bandwidth(), f.truncation_level(), f.information(), g.fisher_location());
    for e in [0.0, 0.5, 1.0, 2.0, 4.0] {
        println!("  e = {e:.1}: fitted {:.3}, true {:.3}", f.eval(e), g.score(e));
    }

    let n = 4000;
    let reps = 100;
    let adaptive = PipelineConfig {
        preliminary: PreliminaryKind::MEstimator,
        discretize: true,
        splitting: Splitting::FourWay,
        score: ScoreKind::Kernel,
        ..PipelineConfig::default()
    };
    let mean = PipelineConfig {
        estimator: EstimatorKind::PreliminaryOnly,
        preliminary: PreliminaryKind::Mean,
        ..PipelineConfig::default()
    };
    for g in [LocationFamily::normal(), LocationFamily::logistic(), LocationFamily::laplace()] {
        let bound = 1.0 / g.fisher_location();
        let name = g.name();
        let model: Arc<dyn ParametricModel> = Arc::new(LocationModel::new(g));
        for (label, cfg) in [("adaptive", &adaptive), ("mean", &mean)] {
            let p = EstimatorPipeline::new(model.clone(), cfg.clone())?;
            let t = replicate(20261018, &format!("{name}/{label}"), reps, |rng| {
                Ok(p.estimate(&model.sample(&[0.0], n, rng)?)?[0])
            })?;
            println!("{name:<9} {label:<9} n Var = {:.3} (bound {bound:.3})", n as f64 * stats::variance(&t));
        }
    }
    Ok(())
}
