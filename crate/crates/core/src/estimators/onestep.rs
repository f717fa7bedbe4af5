//! Discretization, one-step updates and sample splitting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{InfluenceFunction, LocalInfluence};
use crate::models::Observation;

use super::kernel::ScoreEstimator;
use super::preliminary::PreliminaryEstimator;

/// Smallest block allowed in four-way splitting.
pub const MIN_BLOCK: usize = 50;

/// Rounds each coordinate to the nearest point of `(mesh_c / sqrt n) Z`,
/// ties away from zero.
pub fn discretize(theta: &[f64], n: usize, mesh_c: f64) -> Vec<f64> {
    let step = mesh_c / (n as f64).sqrt();
    theta
        .iter()
        .map(|&t| {
            let r = t / step;
            let whole = r.abs().trunc();
            // Ratios that are halves up to representation error count as halves.
            let snapped = if (r.abs() - whole - 0.5).abs() < 1e-9 {
                r.signum() * (whole + 0.5)
            } else {
                r
            };
            snapped.round() * step
        })
        .collect()
}

/// `theta* + mean_i psi(X_i; theta*)`.
pub fn one_step(prelim: &[f64], xs: &[Observation], influence: &InfluenceFunction) -> Result<Vec<f64>> {
    let local = influence.at(prelim)?;
    update(prelim, xs, &local)
}

fn update(theta: &[f64], xs: &[Observation], local: &LocalInfluence) -> Result<Vec<f64>> {
    let step = local.mean_over(xs)?;
    if step.len() != theta.len() {
        return Err(Error::domain(format!(
            "influence has dimension {} but the parameter has {}",
            step.len(),
            theta.len()
        )));
    }
    Ok(theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect())
}

fn prelim_on(prelim: &PreliminaryEstimator, xs: &[Observation], n: usize, mesh: Option<f64>) -> Result<Vec<f64>> {
    let t = prelim.estimate(xs)?;
    Ok(match mesh {
        Some(c) => discretize(&t, n, c),
        None => t,
    })
}

fn combine(w1: f64, a: &[f64], w2: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| w1 * x + w2 * y).collect()
}

/// Two-way splitting: the preliminary from each part is updated with the
/// influence averaged over the other part, and the two updates are combined
/// with weights proportional to the part sizes. `mesh` discretizes the
/// preliminaries on the grid for the full sample size.
pub fn split_one_step(
    xs: &[Observation],
    prelim: &PreliminaryEstimator,
    influence: &InfluenceFunction,
    lambda_frac: f64,
    mesh: Option<f64>,
) -> Result<Vec<f64>> {
    if !(lambda_frac > 0.0 && lambda_frac < 1.0) {
        return Err(Error::domain(format!("lambda must lie in (0, 1), got {lambda_frac}")));
    }
    let n = xs.len();
    if n < 10 {
        return Err(Error::estimation(format!("two-way splitting needs at least 10 observations, got {n}")));
    }
    let cut = (lambda_frac * n as f64).floor() as usize;
    if cut < 2 || n - cut < 2 {
        return Err(Error::estimation(format!("split at {cut} of {n} leaves a part too small")));
    }
    let (first, second) = xs.split_at(cut);
    let t1 = prelim_on(prelim, first, n, mesh)?;
    let t2 = prelim_on(prelim, second, n, mesh)?;
    let u2 = update(&t2, first, &influence.at(&t2)?)?;
    let u1 = update(&t1, second, &influence.at(&t1)?)?;
    let nf = n as f64;
    Ok(combine(cut as f64 / nf, &u2, (n - cut) as f64 / nf, &u1))
}

/// Fractions `0 < lambda < mu < nu < 1` cutting a sample into four blocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitPlan {
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

impl Default for SplitPlan {
    fn default() -> Self {
        Self {
            lambda: 0.25,
            mu: 0.5,
            nu: 0.75,
        }
    }
}

impl SplitPlan {
    pub fn new(lambda: f64, mu: f64, nu: f64) -> Result<Self> {
        let p = Self { lambda, mu, nu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if 0.0 < self.lambda && self.lambda < self.mu && self.mu < self.nu && self.nu < 1.0 {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "split plan needs 0 < lambda < mu < nu < 1, got ({}, {}, {})",
                self.lambda, self.mu, self.nu
            )))
        }
    }

    /// Block end points `(lambda n, mu n, nu n)`, rounded down.
    pub fn cuts(&self, n: usize) -> (usize, usize, usize) {
        let c = |f: f64| (f * n as f64).floor() as usize;
        (c(self.lambda), c(self.mu), c(self.nu))
    }

    /// Sizes of the four blocks, with an error naming the first one below `min`.
    pub fn block_sizes(&self, n: usize, min: usize) -> Result<[usize; 4]> {
        self.validate()?;
        let (a, b, c) = self.cuts(n);
        let sizes = [a, b - a, c - b, n - c];
        for (i, &s) in sizes.iter().enumerate() {
            if s < min {
                return Err(Error::estimation(format!(
                    "block {} has {s} observations, fewer than {min}",
                    i + 1
                )));
            }
        }
        Ok(sizes)
    }
}

/// Where the influence function at a preliminary value comes from.
#[derive(Clone, Debug)]
pub enum InfluenceSource {
    /// A known influence function; the auxiliary block is not used.
    Exact(InfluenceFunction),
    /// Fitted on the auxiliary block.
    Fitted(ScoreEstimator),
}

impl InfluenceSource {
    pub fn local(&self, aux: &[Observation], theta: &[f64]) -> Result<LocalInfluence> {
        match self {
            InfluenceSource::Exact(f) => f.at(theta),
            InfluenceSource::Fitted(e) => e.fit(aux, theta),
        }
    }
}

/// Four-way splitting. With blocks `B1 = [1, lambda n]`, `B2 = (lambda n, mu n]`,
/// `B3 = (mu n, nu n]`, `B4 = (nu n, n]`: preliminary `t1` from `B1` and `t2`
/// from `B3`; influence `f1` fitted on `B2` at `t1` and `f2` on `B4` at `t2`;
/// the estimate is
/// `(mu n / n)(t2 + mean_{B1 u B2} f2) + ((n - mu n) / n)(t1 + mean_{B3 u B4} f1)`.
pub fn semiparametric_one_step(
    xs: &[Observation],
    prelim: &PreliminaryEstimator,
    source: &InfluenceSource,
    plan: &SplitPlan,
    mesh: Option<f64>,
) -> Result<Vec<f64>> {
    let n = xs.len();
    plan.block_sizes(n, MIN_BLOCK)?;
    let (a, b, c) = plan.cuts(n);
    let (b1, b2, b3, b4) = (&xs[..a], &xs[a..b], &xs[b..c], &xs[c..]);
    let t1 = prelim_on(prelim, b1, n, mesh)?;
    let t2 = prelim_on(prelim, b3, n, mesh)?;
    let f1 = source.local(b2, &t1)?;
    let f2 = source.local(b4, &t2)?;
    let u2 = update(&t2, &xs[..b], &f2)?;
    let u1 = update(&t1, &xs[b..], &f1)?;
    let nf = n as f64;
    Ok(combine(b as f64 / nf, &u2, (n - b) as f64 / nf, &u1))
}
