//! The spread order between two distributions.

use serde::Serialize;

use crate::numerics::quantile::QuantileFn;
use crate::numerics::stats::ecdf_values;

/// Outcome of comparing `G` against a bound `K` on a grid of levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpreadComparison {
    pub holds: bool,
    /// Pair `(u, v)` with the largest violation.
    pub worst_pair: (f64, f64),
    /// `max [K^{-1}(v) - K^{-1}(u)] - [G^{-1}(v) - G^{-1}(u)]` over `u < v`.
    pub worst_violation: f64,
}

/// Whether `G` is more spread out than `K` on every grid pair, allowing `slack`.
pub fn is_more_spread(g_inv: &QuantileFn, k_inv: &QuantileFn, grid: &[f64], slack: f64) -> SpreadComparison {
    let g: Vec<f64> = grid.iter().map(|&u| g_inv.eval(u)).collect();
    let k: Vec<f64> = grid.iter().map(|&u| k_inv.eval(u)).collect();
    let mut worst = (f64::NEG_INFINITY, (f64::NAN, f64::NAN));
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            let v = (k[j] - k[i]) - (g[j] - g[i]);
            if v > worst.0 || v.is_nan() {
                worst = (if v.is_nan() { f64::INFINITY } else { v }, (grid[i], grid[j]));
            }
        }
    }
    SpreadComparison {
        holds: worst.0 <= slack,
        worst_pair: worst.1,
        worst_violation: worst.0,
    }
}

/// Mean of `|H_n(S_i) - G_n(T_i - theta_i)|` over joint draws `(S_i, T_i - theta_i)`.
/// Zero exactly when the estimator error is a nondecreasing function of `S`.
pub fn spread_equality_residual(pairs: &[(f64, f64)]) -> f64 {
    if pairs.is_empty() {
        return f64::NAN;
    }
    let s: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let t: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let hs = ecdf_values(&s);
    let gt = ecdf_values(&t);
    let diffs: Vec<f64> = hs.iter().zip(&gt).map(|(a, b)| (a - b).abs()).collect();
    crate::numerics::stats::mean(&diffs)
}
