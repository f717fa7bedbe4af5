//! Spread lower bounds.
//!
//! For a score statistic `S` with quantile function `H^{-1}`, every estimator
//! error distribution `G` satisfies
//! `G^{-1}(v) - G^{-1}(u) >= K^{-1}(v) - K^{-1}(u)` for `0 < u < v < 1`, where
//!
//! ```text
//! K^{-1}(u) = int_{1/2}^{u} ds / J(s),   J(s) = int_s^1 H^{-1}(t) dt.
//! ```
//!
//! `J(s)` is also the density of `K` at `K^{-1}(s)`, which is what the
//! closed-form bounds (uniform, Van Zwet, trigonometric) replace by an envelope.

mod conjugate;
mod order;
mod score;

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate;
use crate::numerics::quantile::{default_grid, order_statistic_index, QuantileFn};
use crate::numerics::rng::RngStream;
use crate::numerics::stats::{normal_pdf, normal_quantile};

pub use conjugate::NormalConjugate;
pub use order::{is_more_spread, spread_equality_residual, SpreadComparison};
pub use score::{general_score_statistic, ScoreStatistic, WeightedParametrization};

/// Number of draws used when `H^{-1}` has to be estimated.
pub const EMPIRICAL_DRAWS: usize = 100_000;

/// Which construction produced a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Score,
    EmpiricalScore,
    Uniform,
    VanZwet,
    Trigonometric,
    Normal,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BoundKind::Score => "score",
            BoundKind::EmpiricalScore => "empirical-score",
            BoundKind::Uniform => "uniform",
            BoundKind::VanZwet => "van-zwet",
            BoundKind::Trigonometric => "trigonometric",
            BoundKind::Normal => "normal",
        };
        f.write_str(s)
    }
}

type LevelFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A spread lower bound `K`, carried as its quantile function together with
/// its density along quantile levels, `s -> k(K^{-1}(s))`.
#[derive(Clone)]
pub struct SpreadBound {
    k_inverse: QuantileFn,
    density_at_level: LevelFn,
    provenance: BoundKind,
}

impl fmt::Debug for SpreadBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpreadBound").field("provenance", &self.provenance).finish_non_exhaustive()
    }
}

impl SpreadBound {
    fn new(k_inverse: QuantileFn, density_at_level: LevelFn, provenance: BoundKind) -> Self {
        Self {
            k_inverse,
            density_at_level,
            provenance,
        }
    }

    pub fn k_inverse(&self) -> &QuantileFn {
        &self.k_inverse
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.k_inverse.eval(u)
    }

    /// Density of `K` at its `s`-quantile.
    pub fn density_at_level(&self, s: f64) -> f64 {
        (self.density_at_level)(s)
    }

    pub fn provenance(&self) -> BoundKind {
        self.provenance
    }

    /// `(u, K^{-1}(u))` on `grid`.
    pub fn table(&self, grid: &[f64]) -> Vec<(f64, f64)> {
        grid.iter().map(|&u| (u, self.eval(u))).collect()
    }

    /// Writes the `(u, K^{-1}(u))` table as two-column CSV.
    pub fn write_csv<W: Write>(&self, grid: &[f64], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "k_inverse"]).map_err(|e| Error::Io(e.to_string()))?;
        for (u, k) in self.table(grid) {
            w.write_record([format!("{u}"), format!("{k}")]).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Log-concavity of the bound's density, checked on `grid`: the slopes of
    /// `log k` against `K^{-1}` must be nonincreasing up to `tol`.
    pub fn is_strongly_unimodal(&self, grid: &[f64], tol: f64) -> bool {
        let pts: Vec<(f64, f64)> = grid
            .iter()
            .map(|&u| (self.eval(u), self.density_at_level(u).ln()))
            .collect();
        let slopes: Vec<f64> = pts
            .windows(2)
            .filter(|w| w[1].0 > w[0].0)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        slopes.windows(2).all(|w| w[1] <= w[0] + tol * (1.0 + w[0].abs()))
    }

    /// The normal bound with the given variance.
    pub fn normal(variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::domain(format!("normal bound needs positive variance, got {variance}")));
        }
        let sd = variance.sqrt();
        Ok(Self::new(
            QuantileFn::new(move |u| if u == 0.5 { 0.0 } else { sd * normal_quantile(u) }),
            Arc::new(move |s| normal_pdf(normal_quantile(s)) / sd),
            BoundKind::Normal,
        ))
    }
}

// Best available value of a quadrature, including a non-converged estimate.
fn quad_value(r: Result<f64>) -> f64 {
    match r {
        Ok(v) => v,
        Err(Error::Numeric { estimate, .. }) => estimate,
        Err(_) => f64::NAN,
    }
}

/// Builds `K` from the law of `S`: analytically when `S` carries its quantile
/// function, otherwise from [`EMPIRICAL_DRAWS`] draws taken from `rng`.
pub fn spread_bound_from_score(s: &ScoreStatistic, quad_tol: f64, rng: &mut RngStream) -> Result<SpreadBound> {
    match s.quantile() {
        Some(h_inv) => spread_bound_from_quantile(h_inv.clone(), quad_tol),
        None => {
            let draws = s.sample(EMPIRICAL_DRAWS, rng)?;
            spread_bound_from_sample(&draws)
        }
    }
}

/// `K` from an analytic `H^{-1}` by nested quadrature.
pub fn spread_bound_from_quantile(h_inv: QuantileFn, quad_tol: f64) -> Result<SpreadBound> {
    if !(quad_tol > 0.0) {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }
    let h = h_inv.clone();
    let upper = integrate(|t| h.eval(t), 0.5, 1.0, quad_tol)?;
    let lower = integrate(|t| h.eval(t), 0.0, 0.5, quad_tol)?;
    let total = upper + lower;

    // J(s) = int_s^1 H^{-1}; below 1/2 go through the total to avoid
    // integrating across the median.
    let h = h_inv.clone();
    let j: LevelFn = Arc::new(move |s: f64| {
        if s >= 0.5 {
            quad_value(integrate(|t| h.eval(t), s, 1.0, quad_tol))
        } else {
            total - quad_value(integrate(|t| h.eval(t), 0.0, s, quad_tol))
        }
    });
    check_positive_envelope(&*j)?;

    let jj = j.clone();
    let k_inv = QuantileFn::new(move |u: f64| {
        if u == 0.5 {
            return 0.0;
        }
        let (a, b, sign) = if u > 0.5 { (0.5, u, 1.0) } else { (u, 0.5, -1.0) };
        sign * quad_value(integrate(|s| 1.0 / jj(s), a, b, quad_tol))
    });
    Ok(SpreadBound::new(k_inv, j, BoundKind::Score))
}

fn check_positive_envelope(j: &dyn Fn(f64) -> f64) -> Result<()> {
    for s in default_grid() {
        let v = j(s);
        if !(v > 0.0) {
            return Err(Error::domain(format!(
                "int_s^1 H^-1 = {v:e} <= 0 at s = {s}; the score statistic must be centred"
            )));
        }
    }
    Ok(())
}

/// `K` from draws of `S`, integrating the step function `H_n^{-1}` exactly.
pub fn spread_bound_from_sample(draws: &[f64]) -> Result<SpreadBound> {
    if draws.len() < 2 {
        return Err(Error::domain("need at least two draws of the score statistic"));
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let nf = n as f64;
    // tail[k] = sum_{j > k} s_(j) / n
    let mut tail = vec![0.0; n];
    for k in (0..n - 1).rev() {
        tail[k] = tail[k + 1] + sorted[k + 1] / nf;
    }
    let sorted = Arc::new(sorted);
    let tail = Arc::new(tail);

    let (s1, t1) = (sorted.clone(), tail.clone());
    let j: LevelFn = Arc::new(move |s: f64| {
        let k = order_statistic_index(n, s);
        s1[k] * ((k + 1) as f64 / nf - s) + t1[k]
    });
    check_positive_envelope(&*j)?;

    let jj = j.clone();
    let k_inv = QuantileFn::new(move |u: f64| {
        if u == 0.5 {
            return 0.0;
        }
        // On cell k, J(s) is linear with slope -s_(k): integrate 1/J exactly.
        let cell = |a: f64, b: f64, k: usize| {
            let ja = jj(a);
            let m = sorted[k];
            let len = b - a;
            if m == 0.0 {
                len / ja
            } else {
                -(-m * len / ja).ln_1p() / m
            }
        };
        let mut acc = 0.0;
        if u > 0.5 {
            let mut a = 0.5;
            while a < u {
                let k = order_statistic_index(n, a.next_up().min(u));
                let b = (((k + 1) as f64) / nf).min(u);
                if b > a {
                    acc += cell(a, b, k);
                }
                a = b.max(a.next_up());
            }
            acc
        } else {
            let mut b = 0.5;
            while b > u {
                let k = order_statistic_index(n, b);
                let a = ((k as f64) / nf).max(u);
                if b > a {
                    acc += cell(a, b, k);
                }
                b = a;
            }
            -acc
        }
    });
    Ok(SpreadBound::new(k_inv, j, BoundKind::EmpiricalScore))
}

/// Uniform bound of length `1 / E|S|`, centred at the median.
pub fn uniform_bound(abs_moment: f64) -> Result<SpreadBound> {
    if !(abs_moment > 0.0) || !abs_moment.is_finite() {
        return Err(Error::domain(format!("E|S| must be positive, got {abs_moment}")));
    }
    let half = 0.5 / abs_moment;
    Ok(SpreadBound::new(
        QuantileFn::new(move |u| (u - 0.5) / abs_moment).with_support(-half, half),
        Arc::new(move |_| abs_moment),
        BoundKind::Uniform,
    ))
}

/// Symmetric triangular bound on `[-sqrt(2/ES^2), sqrt(2/ES^2)]`.
pub fn van_zwet_bound(second_moment: f64) -> Result<SpreadBound> {
    if !(second_moment > 0.0) || !second_moment.is_finite() {
        return Err(Error::domain(format!("E S^2 must be positive, got {second_moment}")));
    }
    let root = second_moment.sqrt();
    let edge = (2.0 / second_moment).sqrt();
    Ok(SpreadBound::new(
        QuantileFn::new(move |u: f64| {
            let tail = u.min(1.0 - u).max(0.0);
            let x = 2.0 / root * (0.5f64.sqrt() - tail.sqrt());
            if u >= 0.5 {
                x
            } else {
                -x
            }
        })
        .with_support(-edge, edge),
        Arc::new(move |s: f64| (second_moment * s.min(1.0 - s)).sqrt()),
        BoundKind::VanZwet,
    ))
}

/// Bound with CDF `(1 + sin(sqrt(ES^2) x)) / 2` on `|x| <= pi / (2 sqrt(ES^2))`.
pub fn trigonometric_bound(second_moment: f64) -> Result<SpreadBound> {
    if !(second_moment > 0.0) || !second_moment.is_finite() {
        return Err(Error::domain(format!("E S^2 must be positive, got {second_moment}")));
    }
    let root = second_moment.sqrt();
    let edge = std::f64::consts::FRAC_PI_2 / root;
    Ok(SpreadBound::new(
        QuantileFn::new(move |u: f64| (2.0 * u - 1.0).clamp(-1.0, 1.0).asin() / root).with_support(-edge, edge),
        Arc::new(move |s: f64| (second_moment * s * (1.0 - s)).sqrt()),
        BoundKind::Trigonometric,
    ))
}
