//! Covariate laws for regression-type models.

use crate::error::{Error, Result};
use crate::numerics::linalg::{Matrix, Vector};
use crate::numerics::rng::RngStream;

/// Multivariate normal covariate law `N(mean, cov)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovariateLaw {
    mean: Vector,
    cov: Matrix,
    chol: Matrix,
}

impl CovariateLaw {
    pub fn normal(mean: Vector, cov: Matrix) -> Result<Self> {
        if cov.nrows() != mean.len() || cov.ncols() != mean.len() {
            return Err(Error::domain("covariate mean and covariance shapes disagree"));
        }
        let chol = nalgebra::Cholesky::new(cov.clone())
            .ok_or_else(|| Error::domain("covariate covariance is not positive definite"))?
            .l();
        Ok(Self { mean, cov, chol })
    }

    /// Scalar normal covariate with the given mean and variance.
    pub fn scalar(mean: f64, var: f64) -> Result<Self> {
        if !(var > 0.0) {
            return Err(Error::domain(format!("covariate variance must be positive, got {var}")));
        }
        Self::normal(Vector::from_element(1, mean), Matrix::from_element(1, 1, var))
    }

    pub fn standard(dim: usize) -> Self {
        Self::normal(Vector::zeros(dim), Matrix::identity(dim, dim)).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &Vector {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix {
        &self.cov
    }

    /// `E Z Z'`.
    pub fn second_moment(&self) -> Matrix {
        &self.cov + &self.mean * self.mean.transpose()
    }

    pub fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        let e = Vector::from_fn(self.dim(), |_, _| rng.standard_normal());
        (&self.mean + &self.chol * e).iter().copied().collect()
    }
}
