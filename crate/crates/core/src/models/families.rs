//! Concrete parametric models.

use crate::error::{Error, Result};
use crate::numerics::linalg::{Matrix, Vector};
use crate::numerics::rng::RngStream;

use super::{CovariateLaw, LocationFamily, Observation, ParametricModel};

/// `N(mu, sigma^2)` with `theta = (mu, sigma)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NormalModel;

impl ParametricModel for NormalModel {
    fn name(&self) -> String {
        "normal".into()
    }
    fn dim(&self) -> usize {
        2
    }
    fn in_domain(&self, theta: &[f64]) -> bool {
        theta.len() == 2 && theta[0].is_finite() && theta[1] > 0.0 && theta[1].is_finite()
    }
    fn log_density(&self, x: &Observation, theta: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        let (mu, s) = (theta[0], theta[1]);
        let z = (x.y - mu) / s;
        Ok(-0.5 * (2.0 * std::f64::consts::PI).ln() - s.ln() - 0.5 * z * z)
    }
    fn score(&self, x: &Observation, theta: &[f64]) -> Result<Vector> {
        self.check_theta(theta)?;
        let (mu, s) = (theta[0], theta[1]);
        let d = x.y - mu;
        Ok(Vector::from_vec(vec![d / (s * s), (d * d / (s * s) - 1.0) / s]))
    }
    fn fisher(&self, theta: &[f64]) -> Result<Matrix> {
        self.check_theta(theta)?;
        let s2 = theta[1] * theta[1];
        Ok(Matrix::from_diagonal(&Vector::from_vec(vec![1.0 / s2, 2.0 / s2])))
    }
    fn sample(&self, theta: &[f64], n: usize, rng: &mut RngStream) -> Result<Vec<Observation>> {
        self.check_theta(theta)?;
        Ok((0..n)
            .map(|_| Observation::scalar(theta[0] + theta[1] * rng.standard_normal()))
            .collect())
    }
}

/// Density `g(x - theta)`.
#[derive(Clone, Debug)]
pub struct LocationModel {
    family: LocationFamily,
}

impl LocationModel {
    pub fn new(family: LocationFamily) -> Self {
        Self { family }
    }

    pub fn family(&self) -> &LocationFamily {
        &self.family
    }
}

impl ParametricModel for LocationModel {
    fn name(&self) -> String {
        format!("location:{}", self.family.name())
    }
    fn dim(&self) -> usize {
        1
    }
    fn in_domain(&self, theta: &[f64]) -> bool {
        theta.len() == 1 && theta[0].is_finite()
    }
    fn log_density(&self, x: &Observation, theta: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        Ok(self.family.log_density(x.y - theta[0]))
    }
    fn score(&self, x: &Observation, theta: &[f64]) -> Result<Vector> {
        self.check_theta(theta)?;
        Ok(Vector::from_element(1, self.family.score(x.y - theta[0])))
    }
    fn fisher(&self, theta: &[f64]) -> Result<Matrix> {
        self.check_theta(theta)?;
        Ok(Matrix::from_element(1, 1, self.family.fisher_location()))
    }
    fn sample(&self, theta: &[f64], n: usize, rng: &mut RngStream) -> Result<Vec<Observation>> {
        self.check_theta(theta)?;
        Ok((0..n)
            .map(|_| Observation::scalar(theta[0] + self.family.sample(rng)))
            .collect())
    }
}

/// Cox model with constant baseline hazard: given `Z = z`, `Y ~ Exp(lambda e^{z nu})`.
/// `theta = (nu, lambda)`; the covariate is scalar.
#[derive(Clone, Debug)]
pub struct CoxModel {
    z_law: CovariateLaw,
}

impl CoxModel {
    pub fn new(z_law: CovariateLaw) -> Result<Self> {
        if z_law.dim() != 1 {
            return Err(Error::domain("the Cox model takes a scalar covariate"));
        }
        if !(z_law.cov()[(0, 0)] > 0.0) {
            return Err(Error::domain("the Cox model needs Var Z > 0"));
        }
        Ok(Self { z_law })
    }

    pub fn z_law(&self) -> &CovariateLaw {
        &self.z_law
    }

    pub fn z_mean(&self) -> f64 {
        self.z_law.mean()[0]
    }

    pub fn z_second_moment(&self) -> f64 {
        self.z_law.second_moment()[(0, 0)]
    }

    pub fn z_variance(&self) -> f64 {
        self.z_law.cov()[(0, 0)]
    }

    fn covariate(x: &Observation) -> Result<f64> {
        x.z.first()
            .copied()
            .ok_or_else(|| Error::domain("Cox observation has no covariate"))
    }
}

impl ParametricModel for CoxModel {
    fn name(&self) -> String {
        "cox".into()
    }
    fn dim(&self) -> usize {
        2
    }
    fn in_domain(&self, theta: &[f64]) -> bool {
        theta.len() == 2 && theta[0].is_finite() && theta[1] > 0.0 && theta[1].is_finite()
    }
    fn log_density(&self, x: &Observation, theta: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        let z = Self::covariate(x)?;
        if x.y < 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let rate = theta[1] * (z * theta[0]).exp();
        Ok(rate.ln() - rate * x.y)
    }
    fn score(&self, x: &Observation, theta: &[f64]) -> Result<Vector> {
        self.check_theta(theta)?;
        let z = Self::covariate(x)?;
        let (nu, lambda) = (theta[0], theta[1]);
        let e = (z * nu).exp();
        Ok(Vector::from_vec(vec![z * (1.0 - e * lambda * x.y), 1.0 / lambda - e * x.y]))
    }
    fn fisher(&self, theta: &[f64]) -> Result<Matrix> {
        self.check_theta(theta)?;
        let lambda = theta[1];
        let ez = self.z_mean();
        Ok(Matrix::from_row_slice(
            2,
            2,
            &[self.z_second_moment(), ez / lambda, ez / lambda, 1.0 / (lambda * lambda)],
        ))
    }
    fn sample(&self, theta: &[f64], n: usize, rng: &mut RngStream) -> Result<Vec<Observation>> {
        self.check_theta(theta)?;
        Ok((0..n)
            .map(|_| {
                let z = self.z_law.sample(rng);
                let rate = theta[1] * (z[0] * theta[0]).exp();
                let y = -rng.open01().ln() / rate;
                Observation::with_covariates(y, z)
            })
            .collect())
    }
}

/// `Y = nu'Z + e` with `e ~ g` independent of `Z`; `theta = nu`.
#[derive(Clone, Debug)]
pub struct LinearRegressionModel {
    family: LocationFamily,
    z_law: CovariateLaw,
}

impl LinearRegressionModel {
    pub fn new(family: LocationFamily, z_law: CovariateLaw) -> Result<Self> {
        if crate::numerics::linalg::min_eigenvalue(&z_law.second_moment()) <= 0.0 {
            return Err(Error::domain("E ZZ' is singular"));
        }
        Ok(Self { family, z_law })
    }

    pub fn family(&self) -> &LocationFamily {
        &self.family
    }

    pub fn z_law(&self) -> &CovariateLaw {
        &self.z_law
    }

    /// Residual `y - nu'z`.
    pub fn residual(&self, x: &Observation, theta: &[f64]) -> Result<f64> {
        if x.z.len() != theta.len() {
            return Err(Error::domain("covariate and parameter dimensions differ"));
        }
        Ok(x.y - x.z.iter().zip(theta).map(|(z, t)| z * t).sum::<f64>())
    }
}

impl ParametricModel for LinearRegressionModel {
    fn name(&self) -> String {
        format!("linreg:{}", self.family.name())
    }
    fn dim(&self) -> usize {
        self.z_law.dim()
    }
    fn in_domain(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim() && theta.iter().all(|t| t.is_finite())
    }
    fn log_density(&self, x: &Observation, theta: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        Ok(self.family.log_density(self.residual(x, theta)?))
    }
    fn score(&self, x: &Observation, theta: &[f64]) -> Result<Vector> {
        self.check_theta(theta)?;
        let s = self.family.score(self.residual(x, theta)?);
        Ok(Vector::from_iterator(x.z.len(), x.z.iter().map(|z| z * s)))
    }
    fn fisher(&self, theta: &[f64]) -> Result<Matrix> {
        self.check_theta(theta)?;
        Ok(self.z_law.second_moment() * self.family.fisher_location())
    }
    fn sample(&self, theta: &[f64], n: usize, rng: &mut RngStream) -> Result<Vec<Observation>> {
        self.check_theta(theta)?;
        Ok((0..n)
            .map(|_| {
                let z = self.z_law.sample(rng);
                let y = z.iter().zip(theta).map(|(z, t)| z * t).sum::<f64>() + self.family.sample(rng);
                Observation::with_covariates(y, z)
            })
            .collect())
    }
}

/// Density `exp(-(x - theta))` on `x > theta`. Not regular: the support
/// moves with the parameter and the Fisher information is undefined.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ExponentialShiftModel;

impl ParametricModel for ExponentialShiftModel {
    fn name(&self) -> String {
        "expshift".into()
    }
    fn dim(&self) -> usize {
        1
    }
    fn in_domain(&self, theta: &[f64]) -> bool {
        theta.len() == 1 && theta[0].is_finite()
    }
    fn log_density(&self, x: &Observation, theta: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        Ok(if x.y > theta[0] {
            -(x.y - theta[0])
        } else {
            f64::NEG_INFINITY
        })
    }
    /// Pointwise derivative of the log-density on the support.
    fn score(&self, x: &Observation, theta: &[f64]) -> Result<Vector> {
        self.check_theta(theta)?;
        Ok(Vector::from_element(1, if x.y > theta[0] { 1.0 } else { 0.0 }))
    }
    fn fisher(&self, _theta: &[f64]) -> Result<Matrix> {
        Err(Error::NotRegular(
            "exponential shift: the support depends on theta, Fisher information is undefined".into(),
        ))
    }
    fn sample(&self, theta: &[f64], n: usize, rng: &mut RngStream) -> Result<Vec<Observation>> {
        self.check_theta(theta)?;
        Ok((0..n)
            .map(|_| Observation::scalar(theta[0] - rng.open01().ln()))
            .collect())
    }
    fn is_regular(&self) -> bool {
        false
    }
}
