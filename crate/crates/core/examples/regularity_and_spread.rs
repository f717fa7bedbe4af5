//! Spread order, regularity and excess variance for several location estimators.
//!
//! Run with `cargo run --release --example regularity_and_spread`.

use std::sync::Arc;

use semieff::diagnostics::{excess_variance, las_spread_check, regularity_check, CheckSettings, LocalAlternative};
use semieff::estimators::{EstimatorKind, EstimatorPipeline, PipelineConfig, PreliminaryKind};
use semieff::models::{LocationFamily, LocationModel, ParametricModel};

fn main() -> semieff::Result<()> {
    let model: Arc<dyn ParametricModel> = Arc::new(LocationModel::new(LocationFamily::normal()));
    let settings = CheckSettings::default();
    let alt = LocalAlternative::new(vec![0.0], vec![1.0])?;
    let (n, reps, seed) = (200, 1000, 20261018);
    for kind in [
        PreliminaryKind::Mean,
        PreliminaryKind::Median,
        PreliminaryKind::MeanMedianMix,
        PreliminaryKind::Constant,
    ] {
        let cfg = PipelineConfig {
            estimator: EstimatorKind::PreliminaryOnly,
            preliminary: kind,
            constant: Some(vec![0.0]),
            ..PipelineConfig::default()
        };
        let p = EstimatorPipeline::new(model.clone(), cfg)?;
        let las = las_spread_check(model.as_ref(), &p, &[0.0], &[1.0], n, reps, seed, &settings)?;
        let reg = regularity_check(model.as_ref(), &p, &alt, n, reps, seed, &settings)?;
        let exc = excess_variance(model.as_ref(), &p, &[0.0], n, reps, seed, &settings)?;
        let ratio = las.cell("increment_ratio_25_75", n).and_then(|c| c.value).unwrap_or(f64::NAN);
        let excess = exc.cell("coord[0]", n).and_then(|c| c.value).unwrap_or(f64::NAN);
        println!(
            "{kind:?}: IQR ratio to bound {ratio:.3}, excess variance {excess:.3}, regular {}, spread verdict {:?}",
            reg.all_passed(),
            las.verdict("las_spread_order").map(|v| (v.passed, v.informational))
        );
    }
    Ok(())
}
