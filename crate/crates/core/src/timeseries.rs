//! Stationary AR(1): `y_t = rho y_{t-1} + e_t` with i.i.d. mean-zero errors.
//!
//! The score for `rho` at time `t` is `W_t l(e_t)` with `W_t = y_{t-1}` and
//! `l = -g'/g`, and the information is `I(g) sigma^2 / (1 - rho^2)`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{discretize, ScoreEstimator, SplitPlan};
use crate::models::LocationFamily;
use crate::numerics::rng::RngStream;
use crate::numerics::stats::{jarque_bera, pairwise_sum};

/// Observations kept apart between a fitting block and its neighbours; a
/// quarter of the smallest block when that is less.
pub const GUARD: usize = 50;

/// A simulated path `y_0, y_1, ..., y_n` with the innovations that drove it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ar1Path {
    pub y0: f64,
    pub y: Vec<f64>,
    pub rho_true: f64,
    pub innovation_tag: String,
    pub innovations: Vec<f64>,
}

fn check_stationary(rho: f64) -> Result<()> {
    if !(rho.abs() < 1.0) {
        return Err(Error::domain(format!("AR(1) needs |rho| < 1, got {rho}")));
    }
    Ok(())
}

/// Simulates `n` observations after a burn-in of `ceil(10 / (1 - |rho|))`
/// steps from zero, which stands in for a draw of `y_0` from the stationary law.
pub fn simulate_ar1(rho: f64, n: usize, g: &LocationFamily, rng: &mut RngStream) -> Result<Ar1Path> {
    check_stationary(rho)?;
    let burn = (10.0 / (1.0 - rho.abs())).ceil() as usize;
    let mut y = 0.0;
    for _ in 0..burn {
        y = rho * y + g.sample(rng);
    }
    let y0 = y;
    let mut ys = Vec::with_capacity(n);
    let mut eps = Vec::with_capacity(n);
    for _ in 0..n {
        let e = g.sample(rng);
        y = rho * y + e;
        ys.push(y);
        eps.push(e);
    }
    Ok(Ar1Path {
        y0,
        y: ys,
        rho_true: rho,
        innovation_tag: g.name().to_string(),
        innovations: eps,
    })
}

impl Ar1Path {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// `y_{t-1}` for `t = 1..n`.
    pub fn lagged(&self) -> Vec<f64> {
        std::iter::once(self.y0).chain(self.y[..self.y.len().saturating_sub(1)].iter().copied()).collect()
    }

    /// `e_t(rho) = y_t - rho y_{t-1}`.
    pub fn residuals(&self, rho: f64) -> Vec<f64> {
        self.y.iter().zip(self.lagged()).map(|(y, w)| y - rho * w).collect()
    }

    /// Single-column CSV preceded by `#` comment lines with the path settings.
    pub fn write_csv<W: Write>(&self, mut out: W, seed: u64) -> Result<()> {
        writeln!(out, "# rho={}", self.rho_true)?;
        writeln!(out, "# n={}", self.len())?;
        writeln!(out, "# g={}", self.innovation_tag)?;
        writeln!(out, "# seed={seed}")?;
        writeln!(out, "# y0={}", self.y0)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["y"]).map_err(|e| Error::Io(e.to_string()))?;
        for y in &self.y {
            w.write_record([y.to_string()]).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `I(rho) = I(g) Var(e) / (1 - rho^2)`.
pub fn ts_fisher(rho: f64, g: &LocationFamily) -> Result<f64> {
    check_stationary(rho)?;
    Ok(g.fisher_location() * g.variance() / (1.0 - rho * rho))
}

/// `(1/n) sum W_t^2 I(g)`, which converges to [`ts_fisher`] along a path.
pub fn ts_fisher_certificate(path: &Ar1Path, g: &LocationFamily) -> f64 {
    let sq: Vec<f64> = path.lagged().iter().map(|w| w * w).collect();
    pairwise_sum(&sq) / path.len() as f64 * g.fisher_location()
}

/// Summands `W_t l(e_t(rho))`.
pub fn score_summands(path: &Ar1Path, rho: f64, g: &LocationFamily) -> Vec<f64> {
    path.lagged()
        .iter()
        .zip(path.residuals(rho))
        .map(|(w, e)| w * g.score(e))
        .collect()
}

/// LAN remainder at `rho + t / sqrt n`:
/// `Lambda_n - [t n^{-1/2} sum l_t - (2n)^{-1} sum (t l_t)^2]`, with the
/// log-likelihood ratio conditional on `y_0`.
pub fn ts_lan_remainder(path: &Ar1Path, rho: f64, t: f64, g: &LocationFamily) -> Result<f64> {
    check_stationary(rho)?;
    let n = path.len() as f64;
    let moved = rho + t / n.sqrt();
    if !(moved.abs() < 1.0) {
        return Err(Error::domain(format!("rho + t/sqrt(n) = {moved} is not stationary")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let e0 = path.residuals(rho);
    let e1 = path.residuals(moved);
    let ratio: Vec<f64> = e0.iter().zip(&e1).map(|(a, b)| g.log_density(*b) - g.log_density(*a)).collect();
    let s = score_summands(path, rho, g);
    let sq: Vec<f64> = s.iter().map(|v| (t * v).powi(2)).collect();
    let quad = t / n.sqrt() * pairwise_sum(&s) - pairwise_sum(&sq) / (2.0 * n);
    Ok(pairwise_sum(&ratio) - quad)
}

/// `(1/n) sum W_t^2 1[|W_t| > delta sqrt n]`.
pub fn lindeberg_statistic(path: &Ar1Path, delta: f64) -> f64 {
    let n = path.len() as f64;
    let cut = delta * n.sqrt();
    let terms: Vec<f64> = path
        .lagged()
        .iter()
        .map(|w| if w.abs() > cut { w * w } else { 0.0 })
        .collect();
    pairwise_sum(&terms) / n
}

/// Jarque-Bera statistic of the block sums of the score summands, each
/// divided by the root of its block length.
pub fn martingale_normality(path: &Ar1Path, rho: f64, g: &LocationFamily, blocks: usize) -> Result<f64> {
    let s = score_summands(path, rho, g);
    if blocks < 8 || s.len() < blocks {
        return Err(Error::domain("need at least 8 blocks, each non-empty"));
    }
    let len = s.len() / blocks;
    let sums: Vec<f64> = s
        .chunks_exact(len)
        .take(blocks)
        .map(|c| pairwise_sum(c) / (len as f64).sqrt())
        .collect();
    Ok(jarque_bera(&sums))
}

/// Outcome of [`adaptive_ar1_estimate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdaptiveAr1 {
    pub estimate: f64,
    /// Least-squares preliminary on the whole path.
    pub preliminary: f64,
    /// A block preliminary had to be pulled back inside `(-1, 1)`.
    pub clamped: bool,
}

fn ls_on(path_y: &[f64], lag: &[f64]) -> Result<f64> {
    let num: Vec<f64> = path_y.iter().zip(lag).map(|(y, w)| y * w).collect();
    let den: Vec<f64> = lag.iter().map(|w| w * w).collect();
    let d = pairwise_sum(&den);
    if !(d > 0.0) {
        return Err(Error::estimation("autoregression on an all-zero block"));
    }
    Ok(pairwise_sum(&num) / d)
}

// Drops `guard` points at each end of [lo, hi) that borders another block.
fn guarded(lo: usize, hi: usize, n: usize, guard: usize) -> (usize, usize) {
    let a = if lo > 0 { lo + guard } else { lo };
    let b = if hi < n { hi.saturating_sub(guard) } else { hi };
    (a, b.max(a))
}

/// Adaptive one-step estimator of `rho` with unknown error density.
///
/// The path is cut into contiguous time blocks `B1..B4` by `plan`. Least-
/// squares preliminaries come from `B1` and `B3`, discretized with mesh
/// `mesh_c / sqrt n`; the error score is fitted on the residuals of `B2` (at
/// the `B1` preliminary) and of `B4` (at the `B3` preliminary). Each update
/// `rho~ + sum W_t s(e_t) / (I^ sum W_t^2)` runs over the half of the path
/// not used for its own fits, and the two halves are averaged with weights
/// proportional to their lengths. Fitting blocks keep a guard of [`GUARD`]
/// observations away from their neighbours.
pub fn adaptive_ar1_estimate(
    path: &Ar1Path,
    score_est: &ScoreEstimator,
    plan: &SplitPlan,
    mesh_c: f64,
) -> Result<AdaptiveAr1> {
    let n = path.len();
    if n < 400 {
        return Err(Error::estimation(format!("adaptive AR(1) needs at least 400 observations, got {n}")));
    }
    let sizes = plan.block_sizes(n, crate::estimators::MIN_BLOCK)?;
    let guard = GUARD.min(sizes.iter().min().copied().unwrap_or(0) / 4);
    let (a, b, c) = plan.cuts(n);
    let lag = path.lagged();
    let y = &path.y;
    let limit = 1.0 - 1.0 / (n as f64).sqrt();
    let mut clamped = false;
    let mut prelim = |lo: usize, hi: usize| -> Result<f64> {
        let (lo, hi) = guarded(lo, hi, n, guard);
        let r = discretize(&[ls_on(&y[lo..hi], &lag[lo..hi])?], n, mesh_c)[0];
        if r.abs() > limit {
            clamped = true;
            return Ok(r.signum() * limit);
        }
        Ok(r)
    };
    let r1 = prelim(0, a)?;
    let r2 = prelim(b, c)?;
    let fit = |lo: usize, hi: usize, rho: f64| {
        let (lo, hi) = guarded(lo, hi, n, guard);
        let eps: Vec<f64> = (lo..hi).map(|t| y[t] - rho * lag[t]).collect();
        score_est.fit_residuals(&eps)
    };
    let f1 = fit(a, b, r1)?;
    let f2 = fit(c, n, r2)?;
    let update = |lo: usize, hi: usize, rho: f64, f: &crate::estimators::FittedScore| {
        let num: Vec<f64> = (lo..hi).map(|t| lag[t] * f.eval(y[t] - rho * lag[t])).collect();
        let den: Vec<f64> = (lo..hi).map(|t| lag[t] * lag[t]).collect();
        rho + pairwise_sum(&num) / (f.information() * pairwise_sum(&den))
    };
    let u2 = update(0, b, r2, &f2);
    let u1 = update(b, n, r1, &f1);
    let nf = n as f64;
    Ok(AdaptiveAr1 {
        estimate: b as f64 / nf * u2 + (n - b) as f64 / nf * u1,
        preliminary: ls_on(y, &lag)?,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::stats::{lag1_autocorrelation, mean, median, variance};

    const SEED: u64 = 20261018;

    #[test]
    fn white_noise_when_rho_is_zero() {
        let g = LocationFamily::normal();
        let p = simulate_ar1(0.0, 100, &g, &mut RngStream::new(SEED, 50)).unwrap();
        assert_eq!(p.y, p.innovations);
        assert!(simulate_ar1(1.0, 10, &g, &mut RngStream::new(SEED, 50)).is_err());
    }

    #[test]
    fn residuals_recover_innovations_exactly() {
        let g = LocationFamily::laplace_unit_variance();
        let p = simulate_ar1(0.7, 1000, &g, &mut RngStream::new(SEED, 51)).unwrap();
        let r = p.residuals(0.7);
        // y_t is computed as rho * y_{t-1} + e_t, so subtraction returns e_t
        // up to one rounding of the sum.
        for (a, b) in r.iter().zip(&p.innovations) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * (1.0 + a.abs().max(p.y.iter().fold(0.0f64, |m, y| m.max(y.abs())))));
        }
    }

    #[test]
    fn stationary_variance() {
        let g = LocationFamily::normal();
        let p = simulate_ar1(0.5, 100_000, &g, &mut RngStream::new(SEED, 52)).unwrap();
        assert!((variance(&p.y) / (4.0 / 3.0) - 1.0).abs() < 0.05);
    }

    #[test]
    fn fisher_values_and_certificate() {
        assert!((ts_fisher(0.5, &LocationFamily::normal()).unwrap() - 4.0 / 3.0).abs() < 1e-9);
        assert!((ts_fisher(0.0, &LocationFamily::logistic()).unwrap() - std::f64::consts::PI.powi(2) / 9.0).abs() < 1e-8);
        let lap = LocationFamily::laplace_unit_variance();
        assert!((ts_fisher(0.5, &lap).unwrap() - 8.0 / 3.0).abs() < 1e-8);
        for (i, g) in [LocationFamily::normal(), lap].iter().enumerate() {
            let p = simulate_ar1(0.5, 100_000, g, &mut RngStream::new(SEED, 53 + i as u64)).unwrap();
            let cert = ts_fisher_certificate(&p, g);
            assert!((cert / ts_fisher(0.5, g).unwrap() - 1.0).abs() < 0.03);
        }
    }

    #[test]
    fn lan_remainder_zero_at_zero_and_exact_form_for_normal() {
        let g = LocationFamily::normal();
        let p = simulate_ar1(0.5, 500, &g, &mut RngStream::new(SEED, 55)).unwrap();
        assert_eq!(ts_lan_remainder(&p, 0.5, 0.0, &g).unwrap(), 0.0);
        // Gaussian: Lambda = t n^{-1/2} S - t^2/(2n) sum W^2, so R = t^2/(2n) sum W^2 (e^2 - 1).
        let t = 1.3;
        let n = p.len() as f64;
        let w = p.lagged();
        let e = p.residuals(0.5);
        let oracle: f64 = w.iter().zip(&e).map(|(w, e)| w * w * (e * e - 1.0)).sum::<f64>() * t * t / (2.0 * n);
        assert!((ts_lan_remainder(&p, 0.5, t, &g).unwrap() - oracle).abs() < 1e-9);
        assert!(ts_lan_remainder(&p, 0.99, 10.0, &g).is_err());
    }

    #[test]
    fn lan_remainder_decays() {
        for g in [LocationFamily::normal(), LocationFamily::laplace_unit_variance()] {
            let med = |n: usize| {
                let r: Vec<f64> = (0..100)
                    .map(|rep| {
                        let p = simulate_ar1(0.5, n, &g, &mut RngStream::new(SEED, 60_000 + rep + n as u64)).unwrap();
                        ts_lan_remainder(&p, 0.5, 1.0, &g).unwrap().abs()
                    })
                    .collect();
                median(&r)
            };
            assert!(med(10_000) < med(100), "{}", g.name());
        }
    }

    #[test]
    fn summands_are_uncorrelated_and_lindeberg_small() {
        let g = LocationFamily::normal();
        let p = simulate_ar1(0.5, 10_000, &g, &mut RngStream::new(SEED, 56)).unwrap();
        let s = score_summands(&p, 0.5, &g);
        assert!(lag1_autocorrelation(&s).abs() < 3.0 / (s.len() as f64).sqrt());
        assert!(mean(&s).abs() < 3.0 * (variance(&s) / s.len() as f64).sqrt());
        assert!(lindeberg_statistic(&p, 0.1) < 1e-3);
        assert!(martingale_normality(&p, 0.5, &g, 100).unwrap() < crate::numerics::stats::JARQUE_BERA_CRIT_1PCT * 3.0);
    }

    #[test]
    fn adaptive_estimate_is_close_and_deterministic() {
        let g = LocationFamily::laplace_unit_variance();
        let p = simulate_ar1(0.5, 4000, &g, &mut RngStream::new(SEED, 57)).unwrap();
        let est = ScoreEstimator::regression();
        let a = adaptive_ar1_estimate(&p, &est, &SplitPlan::default(), 1.0).unwrap();
        assert!((a.estimate - 0.5).abs() < 0.06, "{a:?}");
        assert!(!a.clamped);
        assert_eq!(a, adaptive_ar1_estimate(&p, &est, &SplitPlan::default(), 1.0).unwrap());
        let short = simulate_ar1(0.5, 399, &g, &mut RngStream::new(SEED, 58)).unwrap();
        assert!(adaptive_ar1_estimate(&short, &est, &SplitPlan::default(), 1.0).is_err());
    }

    #[test]
    fn near_unit_root_preliminary_is_clamped() {
        let g = LocationFamily::normal();
        let p = simulate_ar1(0.999, 400, &g, &mut RngStream::new(SEED, 59)).unwrap();
        let a = adaptive_ar1_estimate(&p, &ScoreEstimator::regression(), &SplitPlan::default(), 1.0).unwrap();
        assert!(a.estimate.is_finite());
        assert!(a.clamped);
    }

    #[test]
    fn path_csv_has_header_comments() {
        let g = LocationFamily::normal();
        let p = simulate_ar1(0.5, 3, &g, &mut RngStream::new(SEED, 60)).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf, SEED).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# rho=0.5");
        assert_eq!(lines[3], format!("# seed={SEED}"));
        assert_eq!(lines[5], "y");
        assert_eq!(lines.len(), 9);
    }
}
