//! Declarative estimator pipelines.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::influence_full;
use crate::models::{Observation, ParametricModel};

use super::kernel::{BandwidthRule, ScoreEstimator, TruncationRule};
use super::onestep::{discretize, one_step, semiparametric_one_step, split_one_step, InfluenceSource, SplitPlan};
use super::preliminary::{
    constant_preliminary, m_estimator, mean_median_mix, mean_preliminary, median_preliminary, moments_preliminary,
    PreliminaryEstimator,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreliminaryKind {
    #[default]
    Moments,
    MEstimator,
    Mean,
    Median,
    MeanMedianMix,
    Constant,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Splitting {
    #[default]
    None,
    TwoWay,
    FourWay,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreKind {
    /// The model's own efficient influence function.
    #[default]
    Exact,
    /// Kernel estimate of the error score (location and regression models).
    Kernel,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    #[default]
    OneStep,
    /// Report the (possibly discretized) preliminary itself.
    PreliminaryOnly,
}

fn default_mesh() -> f64 {
    1.0
}

fn default_lambda() -> f64 {
    0.5
}

fn default_mix() -> f64 {
    0.5
}

/// Pipeline description as it appears in experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub estimator: EstimatorKind,
    #[serde(default)]
    pub preliminary: PreliminaryKind,
    /// Value for the constant preliminary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<Vec<f64>>,
    /// Weight of the mean in the mean-median mix.
    #[serde(default = "default_mix")]
    pub mix_weight: f64,
    #[serde(default)]
    pub discretize: bool,
    #[serde(default = "default_mesh")]
    pub mesh_c: f64,
    #[serde(default)]
    pub splitting: Splitting,
    #[serde(default)]
    pub score: ScoreKind,
    #[serde(default)]
    pub plan: SplitPlan,
    #[serde(default = "default_lambda")]
    pub lambda_frac: f64,
    #[serde(default)]
    pub bandwidth: BandwidthRule,
    #[serde(default)]
    pub truncation: TruncationRule,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            estimator: EstimatorKind::default(),
            preliminary: PreliminaryKind::default(),
            constant: None,
            mix_weight: default_mix(),
            discretize: false,
            mesh_c: default_mesh(),
            splitting: Splitting::default(),
            score: ScoreKind::default(),
            plan: SplitPlan::default(),
            lambda_frac: default_lambda(),
            bandwidth: BandwidthRule::default(),
            truncation: TruncationRule::default(),
        }
    }
}

/// A configured estimator for one model.
#[derive(Clone)]
pub struct EstimatorPipeline {
    config: PipelineConfig,
    dim: usize,
    prelim: PreliminaryEstimator,
    source: Option<InfluenceSource>,
}

impl std::fmt::Debug for EstimatorPipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EstimatorPipeline").field("config", &self.config).finish_non_exhaustive()
    }
}

impl EstimatorPipeline {
    /// Checks the combination of settings against the model and wires up the parts.
    pub fn new(model: Arc<dyn ParametricModel>, config: PipelineConfig) -> Result<Self> {
        let name = model.name();
        let dim = model.dim();
        let location = name.starts_with("location:");
        let with_scale = name == "normal";
        let prelim = match config.preliminary {
            PreliminaryKind::Moments => moments_preliminary(name.split(':').next().unwrap_or(&name))?,
            PreliminaryKind::MEstimator if location => m_estimator(),
            PreliminaryKind::MEstimator => {
                return Err(Error::Config(format!("the M-estimator applies to location models, not {name}")))
            }
            PreliminaryKind::Mean | PreliminaryKind::Median | PreliminaryKind::MeanMedianMix
                if !(location || with_scale) =>
            {
                return Err(Error::Config(format!("mean/median preliminaries apply to location models, not {name}")))
            }
            PreliminaryKind::Mean => mean_preliminary(with_scale),
            PreliminaryKind::Median => median_preliminary(with_scale),
            PreliminaryKind::MeanMedianMix => mean_median_mix(config.mix_weight, with_scale),
            PreliminaryKind::Constant => match &config.constant {
                Some(v) if v.len() == dim => constant_preliminary(v.clone()),
                _ => return Err(Error::Config(format!("constant preliminary needs a {dim}-vector 'constant'"))),
            },
        };
        if config.discretize && !(config.mesh_c > 0.0) {
            return Err(Error::Config("mesh_c must be positive".into()));
        }
        config.plan.validate().map_err(|e| Error::Config(e.to_string()))?;
        let source = match (config.estimator, config.score) {
            (EstimatorKind::PreliminaryOnly, _) => None,
            (EstimatorKind::OneStep, ScoreKind::Exact) => {
                if !model.is_regular() {
                    return Err(Error::Config(format!("{name} is not regular and has no efficient influence")));
                }
                Some(InfluenceSource::Exact(influence_full(model.clone(), dim)?))
            }
            (EstimatorKind::OneStep, ScoreKind::Kernel) => {
                if config.splitting != Splitting::FourWay {
                    return Err(Error::Config("a kernel score requires four-way splitting".into()));
                }
                let mut est = if location {
                    ScoreEstimator::symmetric_location()
                } else if name.starts_with("linreg") {
                    ScoreEstimator::regression()
                } else {
                    return Err(Error::Config(format!("no kernel score estimator for {name}")));
                };
                est.bandwidth = config.bandwidth;
                est.truncation = config.truncation;
                Some(InfluenceSource::Fitted(est))
            }
        };
        Ok(Self {
            config,
            dim,
            prelim,
            source,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn mesh(&self) -> Option<f64> {
        self.config.discretize.then_some(self.config.mesh_c)
    }

    pub fn estimate(&self, xs: &[Observation]) -> Result<Vec<f64>> {
        let n = xs.len();
        let source = match &self.source {
            None => {
                let t = self.prelim.estimate(xs)?;
                return Ok(match self.mesh() {
                    Some(c) => discretize(&t, n, c),
                    None => t,
                });
            }
            Some(s) => s,
        };
        match (self.config.splitting, source) {
            (Splitting::FourWay, s) => semiparametric_one_step(xs, &self.prelim, s, &self.config.plan, self.mesh()),
            (Splitting::TwoWay, InfluenceSource::Exact(f)) => {
                split_one_step(xs, &self.prelim, f, self.config.lambda_frac, self.mesh())
            }
            (Splitting::None, InfluenceSource::Exact(f)) => {
                let mut t = self.prelim.estimate(xs)?;
                if let Some(c) = self.mesh() {
                    t = discretize(&t, n, c);
                }
                one_step(&t, xs, f)
            }
            (_, InfluenceSource::Fitted(_)) => Err(Error::Config("a kernel score requires four-way splitting".into())),
        }
    }
}
