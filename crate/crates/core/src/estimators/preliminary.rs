//! Root-n consistent preliminary estimators.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::models::Observation;
use crate::numerics::linalg::{solve_spd, Matrix, Vector};
use crate::numerics::stats;

type EstimateFn = Arc<dyn Fn(&[Observation]) -> Result<Vec<f64>> + Send + Sync>;

/// A preliminary estimator with a note on why it is root-n consistent.
#[derive(Clone)]
pub struct PreliminaryEstimator {
    name: String,
    certificate: String,
    estimate: EstimateFn,
}

impl fmt::Debug for PreliminaryEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PreliminaryEstimator").field("name", &self.name).finish_non_exhaustive()
    }
}

impl PreliminaryEstimator {
    pub fn new(
        name: impl Into<String>,
        certificate: impl Into<String>,
        estimate: impl Fn(&[Observation]) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            certificate: certificate.into(),
            estimate: Arc::new(estimate),
        }
    }

    pub fn estimate(&self, xs: &[Observation]) -> Result<Vec<f64>> {
        if xs.is_empty() {
            return Err(Error::estimation(format!("{}: empty sample", self.name)));
        }
        (self.estimate)(xs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rate_certificate(&self) -> &str {
        &self.certificate
    }
}

fn responses(xs: &[Observation]) -> Vec<f64> {
    xs.iter().map(|x| x.y).collect()
}

/// Solves `sum psi(x_i - theta) = 0` for increasing `psi` with derivative
/// `dpsi`: bisection on `[min - 1, max + 1]`, then safeguarded Newton to
/// `|sum psi| <= 1e-10 n`.
pub fn solve_m_equation(xs: &[f64], psi: &dyn Fn(f64) -> f64, dpsi: &dyn Fn(f64) -> f64) -> Result<f64> {
    let n = xs.len();
    if n == 0 {
        return Err(Error::estimation("M-estimator on an empty sample"));
    }
    let f = |t: f64| stats::pairwise_sum(&xs.iter().map(|x| psi(x - t)).collect::<Vec<_>>());
    let df = |t: f64| -xs.iter().map(|x| dpsi(x - t)).sum::<f64>();
    let lo0 = xs.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let hi0 = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let (mut lo, mut hi) = (lo0, hi0);
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(Error::estimation(format!(
            "no sign change of sum psi on [{lo}, {hi}] (values {flo}, {fhi})"
        )));
    }
    let tol = 1e-10 * n as f64;
    // A few bisection steps to get into the Newton basin.
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol {
            return Ok(mid);
        }
        if fm > 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let ft = f(t);
        if ft.abs() <= tol {
            return Ok(t);
        }
        if ft > 0.0 {
            lo = t
        } else {
            hi = t
        }
        let d = df(t);
        let newton = t - ft / d;
        t = if d < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * t.abs().max(1.0) {
            return Ok(t);
        }
    }
    Err(Error::estimation("M-estimator did not converge"))
}

/// Location M-estimator with `psi = tanh`.
pub fn m_estimator() -> PreliminaryEstimator {
    PreliminaryEstimator::new(
        "m-estimator",
        "location M-estimator with bounded, smooth, odd psi = tanh; asymptotically normal at rate root n",
        |xs| {
            let ys = responses(xs);
            let t = solve_m_equation(&ys, &|u: f64| u.tanh(), &|u: f64| 1.0 / u.cosh().powi(2))?;
            Ok(vec![t])
        },
    )
}

/// Moment-based preliminaries by model tag: `normal` gives `(mean, sd)`,
/// `location` (or `location:*`) the sample mean, `cox` a moment inversion
/// valid for a normal covariate, `linreg` least squares, and `ar1` the least-squares autoregression coefficient of the
/// responses read as a time series.
pub fn moments_preliminary(tag: &str) -> Result<PreliminaryEstimator> {
    let tag = if tag.starts_with("location:") { "location" } else { tag };
    match tag {
        "normal" => Ok(PreliminaryEstimator::new("moments:normal", "sample mean and standard deviation; CLT", |xs| {
            let ys = responses(xs);
            let sd = stats::variance(&ys).sqrt();
            if !(sd > 0.0) {
                return Err(Error::estimation("sample standard deviation is zero"));
            }
            Ok(vec![stats::mean(&ys), sd])
        })),
        "location" => Ok(PreliminaryEstimator::new("moments:location", "sample mean; CLT with finite variance", |xs| {
            Ok(vec![stats::mean(&responses(xs))])
        })),
        "cox" => Ok(PreliminaryEstimator::new(
            "moments:cox",
            "smooth function of sample moments (E Y, E ZY, E Z, Var Z) under a normal covariate; delta method",
            cox_moments,
        )),
        "linreg" => Ok(PreliminaryEstimator::new(
            "moments:linreg",
            "ordinary least squares; root-n with finite error variance and nonsingular E ZZ'",
            least_squares,
        )),
        "ar1" => Ok(PreliminaryEstimator::new(
            "moments:ar1",
            "least-squares autoregression; root-n consistent for stationary AR(1)",
            |xs| Ok(vec![ls_autoregression(&responses(xs))?]),
        )),
        other => Err(Error::Config(format!("no moment preliminary for model '{other}'"))),
    }
}

/// `sum y_t y_{t-1} / sum y_{t-1}^2`.
pub fn ls_autoregression(ys: &[f64]) -> Result<f64> {
    if ys.len() < 3 {
        return Err(Error::estimation("autoregression needs at least three observations"));
    }
    let num: Vec<f64> = ys.windows(2).map(|w| w[0] * w[1]).collect();
    let den: Vec<f64> = ys[..ys.len() - 1].iter().map(|y| y * y).collect();
    let d = stats::pairwise_sum(&den);
    if !(d > 0.0) {
        return Err(Error::estimation("autoregression on an all-zero series"));
    }
    Ok(stats::pairwise_sum(&num) / d)
}

fn least_squares(xs: &[Observation]) -> Result<Vec<f64>> {
    let k = xs[0].z.len();
    if k == 0 || xs.iter().any(|x| x.z.len() != k) {
        return Err(Error::estimation("least squares needs covariates of one common dimension"));
    }
    let mut zz = Matrix::zeros(k, k);
    let mut zy = Vector::zeros(k);
    for x in xs {
        let z = Vector::from_column_slice(&x.z);
        zz += &z * z.transpose();
        zy += z * x.y;
    }
    let beta = solve_spd(&zz, &zy).map_err(|e| Error::estimation(format!("least squares: {e}")))?;
    Ok(beta.iter().copied().collect())
}

// Under Z ~ N(m, v): E Y = exp(-nu m + nu^2 v / 2) / lambda and
// E ZY / E Y = m - nu v.
fn cox_moments(xs: &[Observation]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.z.len() != 1) {
        return Err(Error::estimation("Cox moments need one covariate per observation"));
    }
    let z: Vec<f64> = xs.iter().map(|x| x.z[0]).collect();
    let y = responses(xs);
    let zy: Vec<f64> = xs.iter().map(|x| x.z[0] * x.y).collect();
    let (m, v) = (stats::mean(&z), stats::variance(&z));
    let (ybar, zybar) = (stats::mean(&y), stats::mean(&zy));
    if !(v > 0.0 && ybar > 0.0) {
        return Err(Error::estimation("degenerate covariates or responses"));
    }
    let nu = (m - zybar / ybar) / v;
    let lambda = (-nu * m + 0.5 * nu * nu * v).exp() / ybar;
    Ok(vec![nu, lambda])
}

/// Sample mean of `y`, followed by the standard deviation when `with_scale`.
pub fn mean_preliminary(with_scale: bool) -> PreliminaryEstimator {
    PreliminaryEstimator::new("mean", "sample mean; CLT", move |xs| {
        let ys = responses(xs);
        let mut out = vec![stats::mean(&ys)];
        if with_scale {
            out.push(stats::variance(&ys).sqrt());
        }
        Ok(out)
    })
}

/// Sample median of `y`, followed by the standard deviation when `with_scale`.
pub fn median_preliminary(with_scale: bool) -> PreliminaryEstimator {
    PreliminaryEstimator::new("median", "sample median; root-n for a density positive at the median", move |xs| {
        let ys = responses(xs);
        let mut out = vec![stats::median(&ys)];
        if with_scale {
            out.push(stats::variance(&ys).sqrt());
        }
        Ok(out)
    })
}

/// `w * mean + (1 - w) * median` of `y`.
pub fn mean_median_mix(weight: f64, with_scale: bool) -> PreliminaryEstimator {
    PreliminaryEstimator::new("mean-median-mix", "convex combination of root-n estimators", move |xs| {
        let ys = responses(xs);
        let mut out = vec![weight * stats::mean(&ys) + (1.0 - weight) * stats::median(&ys)];
        if with_scale {
            out.push(stats::variance(&ys).sqrt());
        }
        Ok(out)
    })
}

/// Ignores the data. Not consistent; used to illustrate irregular estimators.
pub fn constant_preliminary(value: Vec<f64>) -> PreliminaryEstimator {
    PreliminaryEstimator::new("constant", "none: the constant estimator is not consistent", move |_| Ok(value.clone()))
}
