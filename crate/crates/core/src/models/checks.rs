//! Numerical regularity checks for parametric models.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::linalg::{Matrix, Vector};
use crate::numerics::rng::RngStream;
use crate::numerics::stats::{kolmogorov_pvalue, ks_one_sample, mean, mean_stderr};

use super::{CoxModel, ParametricModel};

/// Coordinatewise mean of the score under `P_theta`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreMeanCheck {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Every coordinate within three standard errors of zero.
    pub passes: bool,
}

pub fn score_mean_check(
    model: &dyn ParametricModel,
    theta: &[f64],
    n: usize,
    rng: &mut RngStream,
) -> Result<ScoreMeanCheck> {
    let xs = model.sample(theta, n, rng)?;
    let scores = xs.iter().map(|x| model.score(x, theta)).collect::<Result<Vec<_>>>()?;
    let k = model.dim();
    let mut means = Vec::with_capacity(k);
    let mut errs = Vec::with_capacity(k);
    for j in 0..k {
        let col: Vec<f64> = scores.iter().map(|s| s[j]).collect();
        means.push(mean(&col));
        errs.push(mean_stderr(&col));
    }
    let passes = means.iter().zip(&errs).all(|(m, e)| m.abs() <= 3.0 * e);
    Ok(ScoreMeanCheck {
        mean: means,
        stderr: errs,
        passes,
    })
}

/// The Fisher information three ways: closed form, Monte Carlo outer product
/// of scores, and Monte Carlo negative Hessian of the log-density.
#[derive(Clone, Debug, PartialEq)]
pub struct FisherRoutes {
    pub closed: Matrix,
    pub outer: Matrix,
    pub outer_stderr: Matrix,
    pub hessian: Matrix,
    pub hessian_stderr: Matrix,
}

impl FisherRoutes {
    /// Both estimates within `k` standard errors of the closed form,
    /// entrywise. A relative allowance of `1e-3` covers the finite-difference
    /// bias of the Hessian route on entries with no sampling noise.
    pub fn agrees(&self, k: f64) -> bool {
        let ok = |est: &Matrix, se: &Matrix| {
            est.iter()
                .zip(se.iter())
                .zip(self.closed.iter())
                .all(|((e, s), c)| (e - c).abs() <= k * s + 1e-3 * c.abs().max(1e-9))
        };
        ok(&self.outer, &self.outer_stderr) && ok(&self.hessian, &self.hessian_stderr)
    }
}

fn mean_matrix(items: &[Matrix], k: usize) -> (Matrix, Matrix) {
    let mut m = Matrix::zeros(k, k);
    let mut se = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let col: Vec<f64> = items.iter().map(|a| a[(i, j)]).collect();
            m[(i, j)] = mean(&col);
            se[(i, j)] = mean_stderr(&col);
        }
    }
    (m, se)
}

/// The Hessian route differentiates the score by central differences with
/// step `1e-2` (relative to `max(1, |theta_j|)`), so it also works for scores
/// that are only almost everywhere differentiable.
pub fn fisher_two_routes(
    model: &dyn ParametricModel,
    theta: &[f64],
    n: usize,
    rng: &mut RngStream,
) -> Result<FisherRoutes> {
    let closed = model.fisher(theta)?;
    let k = model.dim();
    let xs = model.sample(theta, n, rng)?;
    let mut outers = Vec::with_capacity(n);
    let mut hessians = Vec::with_capacity(n);
    for x in &xs {
        let s = model.score(x, theta)?;
        outers.push(&s * s.transpose());
        let mut h = Matrix::zeros(k, k);
        for j in 0..k {
            let step = 1e-2 * theta[j].abs().max(1.0);
            let mut up = theta.to_vec();
            let mut dn = theta.to_vec();
            up[j] += step;
            dn[j] -= step;
            let d = (model.score(x, &up)? - model.score(x, &dn)?) / (2.0 * step);
            h.set_column(j, &(-d));
        }
        hessians.push(h);
    }
    let (outer, outer_stderr) = mean_matrix(&outers, k);
    let (hessian, hessian_stderr) = mean_matrix(&hessians, k);
    Ok(FisherRoutes {
        closed,
        outer,
        outer_stderr,
        hessian,
        hessian_stderr,
    })
}

/// `||s(theta + h) - s(theta) - h'score s(theta)/2|| / |h|` in `L2`, with `s` the root density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrechetQuotient {
    pub h: f64,
    pub quotient: f64,
    pub stderr: f64,
}

/// Estimates the root-density differentiability quotient along `direction`
/// for each step size in `hs`, integrating under `P_theta` by reweighting.
/// One sample is shared by all step sizes.
pub fn frechet_quotients(
    model: &dyn ParametricModel,
    theta: &[f64],
    direction: &[f64],
    hs: &[f64],
    n: usize,
    rng: &mut RngStream,
) -> Result<Vec<FrechetQuotient>> {
    model.check_theta(theta)?;
    let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
    if direction.len() != theta.len() || norm == 0.0 {
        return Err(Error::domain("direction must be a nonzero vector of the parameter's length"));
    }
    let unit: Vec<f64> = direction.iter().map(|d| d / norm).collect();
    let xs = model.sample(theta, n, rng)?;
    let base = xs
        .iter()
        .map(|x| Ok((model.log_density(x, theta)?, model.score(x, theta)?)))
        .collect::<Result<Vec<(f64, Vector)>>>()?;
    hs.iter()
        .map(|&h| {
            let moved: Vec<f64> = theta.iter().zip(&unit).map(|(t, u)| t + h * u).collect();
            model.check_theta(&moved)?;
            let terms = xs
                .iter()
                .zip(&base)
                .map(|(x, (l0, s))| {
                    let ratio = (0.5 * (model.log_density(x, &moved)? - l0)).exp();
                    let lin: f64 = s.iter().zip(&unit).map(|(a, u)| a * u).sum::<f64>() * h;
                    Ok((ratio - 1.0 - 0.5 * lin).powi(2))
                })
                .collect::<Result<Vec<f64>>>()?;
            let m = mean(&terms);
            let root = m.sqrt();
            let stderr = if root > 0.0 {
                mean_stderr(&terms) / (2.0 * root * h.abs())
            } else {
                0.0
            };
            Ok(FrechetQuotient {
                h,
                quotient: root / h.abs(),
                stderr,
            })
        })
        .collect()
}

/// p-value of the KS test that `exp(nu z) lambda Y` given `Z` is standard exponential.
pub fn cox_hazard_check(model: &CoxModel, theta: &[f64], n: usize, rng: &mut RngStream) -> Result<f64> {
    let xs = model.sample(theta, n, rng)?;
    let w: Vec<f64> = xs.iter().map(|x| (theta[0] * x.z[0]).exp() * theta[1] * x.y).collect();
    let d = ks_one_sample(&w, |t| if t <= 0.0 { 0.0 } else { -(-t).exp_m1() });
    Ok(kolmogorov_pvalue(d, n))
}

/// Largest relative Frobenius change of the Fisher information between
/// `theta` and points at distance `radius` along each coordinate. A finite
/// proxy for continuity of the information.
pub fn fisher_continuity(model: &dyn ParametricModel, theta: &[f64], radius: f64) -> Result<f64> {
    let base = model.fisher(theta)?;
    let mut worst: f64 = 0.0;
    for j in 0..theta.len() {
        for sign in [-1.0, 1.0] {
            let mut t = theta.to_vec();
            t[j] += sign * radius;
            if !model.in_domain(&t) {
                continue;
            }
            let f = model.fisher(&t)?;
            worst = worst.max((f - &base).norm() / base.norm());
        }
    }
    Ok(worst)
}
