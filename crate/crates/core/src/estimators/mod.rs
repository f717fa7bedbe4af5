//! Efficient estimators: preliminaries, discretization, one-step updates,
//! sample splitting and kernel score estimation.

mod kernel;
mod onestep;
mod pipeline;
mod preliminary;

pub use kernel::{BandwidthRule, FittedScore, ResidualKind, ScoreEstimator, TruncationRule};
pub use onestep::{
    discretize, one_step, semiparametric_one_step, split_one_step, InfluenceSource, SplitPlan, MIN_BLOCK,
};
pub use pipeline::{EstimatorKind, EstimatorPipeline, PipelineConfig, PreliminaryKind, ScoreKind, Splitting};
pub use preliminary::{
    constant_preliminary, ls_autoregression, m_estimator, mean_median_mix, mean_preliminary, median_preliminary,
    moments_preliminary, solve_m_equation, PreliminaryEstimator,
};
