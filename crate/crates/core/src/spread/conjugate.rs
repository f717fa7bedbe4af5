//! Normal observations under a normal weight on the location.

use crate::error::{Error, Result};
use crate::numerics::linalg::Vector;
use crate::numerics::rng::RngStream;

use super::score::{ScoreStatistic, WeightedParametrization};

/// `theta ~ N(prior_mean, prior_var)`, then `n` draws `X_i ~ N(theta, noise_var)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalConjugate {
    pub prior_mean: f64,
    pub prior_var: f64,
    pub noise_var: f64,
    pub n: usize,
}

impl NormalConjugate {
    pub fn new(prior_mean: f64, prior_var: f64, noise_var: f64, n: usize) -> Result<Self> {
        if !(prior_var > 0.0 && noise_var > 0.0) || n == 0 {
            return Err(Error::domain("variances must be positive and n at least one"));
        }
        Ok(Self {
            prior_mean,
            prior_var,
            noise_var,
            n,
        })
    }

    /// Variance of the score statistic, the reciprocal of the bound's variance.
    pub fn score_variance(&self) -> f64 {
        self.n as f64 / self.noise_var + 1.0 / self.prior_var
    }

    pub fn draw_joint(&self, rng: &mut RngStream) -> (f64, Vec<f64>) {
        let theta = self.prior_mean + self.prior_var.sqrt() * rng.standard_normal();
        let sd = self.noise_var.sqrt();
        let xs = (0..self.n).map(|_| theta + sd * rng.standard_normal()).collect();
        (theta, xs)
    }

    pub fn parametrization(&self) -> WeightedParametrization {
        let (m, v) = (self.prior_mean, self.prior_var);
        WeightedParametrization::coordinate(1, 0, move |t| Vector::from_element(1, -(t[0] - m) / v))
    }

    pub fn model_score(&self, xs: &[f64], theta: f64) -> Vector {
        Vector::from_element(1, xs.iter().map(|x| x - theta).sum::<f64>() / self.noise_var)
    }

    /// Weighted score statistic for one joint draw.
    pub fn statistic(&self, xs: &[f64], theta: f64) -> Result<f64> {
        self.parametrization().statistic(&self.model_score(xs, theta), &[theta])
    }

    /// The score statistic's law, known to be `N(0, score_variance)`.
    pub fn score_statistic(&self) -> ScoreStatistic {
        let me = *self;
        let analytic = ScoreStatistic::normal(self.score_variance());
        let q = analytic.quantile().cloned().expect("normal law has a quantile");
        ScoreStatistic::from_sampler(move |rng| {
            let (theta, xs) = me.draw_joint(rng);
            me.statistic(&xs, theta)
        })
        .with_quantile(q)
        .with_moments(analytic.abs_moment().unwrap_or(f64::NAN), self.score_variance())
    }

    pub fn posterior_mean(&self, xs: &[f64]) -> f64 {
        let sum: f64 = xs.iter().sum();
        (sum / self.noise_var + self.prior_mean / self.prior_var) / self.score_variance()
    }
}
