//! Regular parametric models with exact scores and Fisher information.

mod checks;
mod covariates;
mod density;
mod families;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::{Matrix, Vector};
use crate::numerics::rng::RngStream;

pub use checks::{
    cox_hazard_check, fisher_continuity, fisher_two_routes, frechet_quotients, score_mean_check, FisherRoutes,
    FrechetQuotient, ScoreMeanCheck,
};
pub use covariates::CovariateLaw;
pub use density::{ErrorDensity, Gumbel, Laplace, LocationFamily, Logistic, Normal};
pub use families::{CoxModel, ExponentialShiftModel, LinearRegressionModel, LocationModel, NormalModel};

/// One observation: a response `y` and optional covariates `z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub y: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub z: Vec<f64>,
}

impl Observation {
    pub fn scalar(y: f64) -> Self {
        Self { y, z: Vec::new() }
    }

    pub fn with_covariates(y: f64, z: Vec<f64>) -> Self {
        Self { y, z }
    }
}

/// Wraps plain numbers as covariate-free observations.
pub fn scalar_sample(ys: &[f64]) -> Vec<Observation> {
    ys.iter().map(|&y| Observation::scalar(y)).collect()
}

/// A smoothly parametrized family `{P_theta}` on `R^k`.
///
/// Log-densities are with respect to a fixed dominating measure; factors not
/// depending on `theta` (such as a known covariate density) may be dropped.
pub trait ParametricModel: Send + Sync {
    fn name(&self) -> String;

    fn dim(&self) -> usize;

    fn in_domain(&self, theta: &[f64]) -> bool;

    fn log_density(&self, x: &Observation, theta: &[f64]) -> Result<f64>;

    fn score(&self, x: &Observation, theta: &[f64]) -> Result<Vector>;

    fn fisher(&self, theta: &[f64]) -> Result<Matrix>;

    fn sample(&self, theta: &[f64], n: usize, rng: &mut RngStream) -> Result<Vec<Observation>>;

    fn is_regular(&self) -> bool {
        true
    }

    /// Domain error unless `theta` has the right length and lies in the domain.
    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::domain(format!(
                "{} expects a {}-dimensional parameter, got {}",
                self.name(),
                self.dim(),
                theta.len()
            )));
        }
        if !self.in_domain(theta) {
            return Err(Error::domain(format!("{:?} is outside the parameter space of {}", theta, self.name())));
        }
        Ok(())
    }

    /// Sum of log-densities over a sample.
    fn log_likelihood(&self, xs: &[Observation], theta: &[f64]) -> Result<f64> {
        let terms = xs.iter().map(|x| self.log_density(x, theta)).collect::<Result<Vec<_>>>()?;
        Ok(crate::numerics::stats::pairwise_sum(&terms))
    }
}

/// A registry entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelInfo {
    pub name: &'static str,
    pub dim: usize,
    pub default_theta: Vec<f64>,
    pub regular: bool,
    pub description: &'static str,
}

/// Names accepted by [`build_model`], plus the AR(1) time-series model.
pub fn list_models() -> Vec<ModelInfo> {
    vec![
        ModelInfo {
            name: "normal",
            dim: 2,
            default_theta: vec![0.0, 1.0],
            regular: true,
            description: "normal location-scale, theta = (mu, sigma)",
        },
        ModelInfo {
            name: "location:normal",
            dim: 1,
            default_theta: vec![0.0],
            regular: true,
            description: "location family with standard normal errors",
        },
        ModelInfo {
            name: "location:laplace",
            dim: 1,
            default_theta: vec![0.0],
            regular: true,
            description: "location family with Laplace errors",
        },
        ModelInfo {
            name: "location:logistic",
            dim: 1,
            default_theta: vec![0.0],
            regular: true,
            description: "location family with logistic errors",
        },
        ModelInfo {
            name: "cox",
            dim: 2,
            default_theta: vec![0.0, 1.0],
            regular: true,
            description: "parametric Cox model with exponential baseline, theta = (nu, lambda)",
        },
        ModelInfo {
            name: "linreg",
            dim: 2,
            default_theta: vec![0.0, 0.0],
            regular: true,
            description: "linear regression y = nu'z + e with standard normal z",
        },
        ModelInfo {
            name: "expshift",
            dim: 1,
            default_theta: vec![0.0],
            regular: false,
            description: "exponential shift, density exp(-(x - theta)) on x > theta (not regular)",
        },
        ModelInfo {
            name: "ar1",
            dim: 1,
            default_theta: vec![0.5],
            regular: true,
            description: "stationary AR(1) y_t = rho y_{t-1} + e_t (time series; see the timeseries module)",
        },
    ]
}

/// Settings that some registry models take.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Error density for `location:*`, `linreg` and `ar1`; defaults per model.
    #[serde(default)]
    pub errors: Option<String>,
    /// Covariate mean (`cox`: scalar, `linreg`: per coordinate).
    #[serde(default)]
    pub z_mean: Option<Vec<f64>>,
    /// Covariate variance per coordinate.
    #[serde(default)]
    pub z_var: Option<Vec<f64>>,
}

fn diagonal_law(mean: Vec<f64>, var: Vec<f64>) -> Result<CovariateLaw> {
    if mean.len() != var.len() {
        return Err(Error::Config("z_mean and z_var lengths differ".into()));
    }
    CovariateLaw::normal(Vector::from_vec(mean), Matrix::from_diagonal(&Vector::from_vec(var)))
        .map_err(|e| Error::Config(e.to_string()))
}

/// Builds an i.i.d. model by registry name.
pub fn build_model(name: &str, params: &ModelParams) -> Result<Box<dyn ParametricModel>> {
    let family = |default: &str| LocationFamily::by_name(params.errors.as_deref().unwrap_or(default));
    match name {
        "normal" => Ok(Box::new(NormalModel)),
        "cox" => {
            let mean = params.z_mean.clone().unwrap_or_else(|| vec![1.0]);
            let var = params.z_var.clone().unwrap_or_else(|| vec![1.0]);
            if mean.len() != 1 {
                return Err(Error::Config("cox takes a scalar covariate".into()));
            }
            Ok(Box::new(CoxModel::new(diagonal_law(mean, var)?)?))
        }
        "linreg" => {
            let mean = params.z_mean.clone().unwrap_or_else(|| vec![0.0, 0.0]);
            let var = params.z_var.clone().unwrap_or_else(|| vec![1.0; mean.len()]);
            Ok(Box::new(LinearRegressionModel::new(family("normal")?, diagonal_law(mean, var)?)?))
        }
        "expshift" => Ok(Box::new(ExponentialShiftModel)),
        "ar1" => Err(Error::Config(
            "ar1 is a time-series model and has no i.i.d. form; use the ar1 pipeline".into(),
        )),
        other => match other.strip_prefix("location:") {
            Some(g) => Ok(Box::new(LocationModel::new(LocationFamily::by_name(g)?))),
            None => Err(Error::Config(format!("unknown model '{other}'"))),
        },
    }
}
