//! Quantile functions.
//!
//! All quantiles use the left-continuous generalized inverse
//! `F^{-1}(u) = inf { x : F(x) >= u }`; empirical quantiles never interpolate.

use std::fmt;
use std::sync::Arc;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Index (0-based) of the order statistic returned by the generalized inverse
/// of an empirical CDF with `n` atoms at level `u`.
pub(crate) fn order_statistic_index(n: usize, u: f64) -> usize {
    let nf = n as f64;
    let mut k = (nf * u).ceil().max(1.0).min(nf) as usize;
    // Guard the ceil against rounding in n*u: k must be the least k with k/n >= u.
    while k > 1 && (k - 1) as f64 / nf >= u {
        k -= 1;
    }
    while k < n && (k as f64) / nf < u {
        k += 1;
    }
    k - 1
}

/// `inf { x : F_n(x) >= u }` for the empirical CDF of `sample`.
pub fn empirical_quantile(sample: &[f64], u: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::domain("empirical quantile of an empty sample"));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain(format!("quantile level must lie in (0,1), got {u}")));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[order_statistic_index(sorted.len(), u)])
}

/// A monotone map from (0, 1) to the reals.
#[derive(Clone)]
pub struct QuantileFn {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    support_hint: Option<(f64, f64)>,
}

impl fmt::Debug for QuantileFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantileFn")
            .field("support_hint", &self.support_hint)
            .finish_non_exhaustive()
    }
}

impl QuantileFn {
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
            support_hint: None,
        }
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support_hint = Some((lo, hi));
        self
    }

    /// Quantile function of the empirical distribution of `sample`.
    pub fn empirical(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::domain("empirical quantile of an empty sample"));
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        let lo = sorted[0];
        let hi = sorted[sorted.len() - 1];
        let sorted = Arc::new(sorted);
        Ok(Self::new(move |u| sorted[order_statistic_index(sorted.len(), u)]).with_support(lo, hi))
    }

    pub fn normal(mean: f64, sd: f64) -> Self {
        let n = Normal::new(mean, sd).expect("normal parameters");
        Self::new(move |u| n.inverse_cdf(u))
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.eval)(u)
    }

    pub fn support_hint(&self) -> Option<(f64, f64)> {
        self.support_hint
    }

    /// Quantile function of `scale * X + shift`.
    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        let inner = self.clone();
        let q = Self::new(move |u| scale * inner.eval(u) + shift);
        match self.support_hint {
            Some((lo, hi)) if scale >= 0.0 => q.with_support(scale * lo + shift, scale * hi + shift),
            _ => q,
        }
    }

    pub fn is_monotone_on(&self, grid: &[f64]) -> bool {
        grid.windows(2).all(|w| self.eval(w[0]) <= self.eval(w[1]))
    }
}

/// `{0.005, 0.010, ..., 0.995}`, the default interior evaluation grid.
pub fn default_grid() -> Vec<f64> {
    (1..200).map(|i| i as f64 * 0.005).collect()
}

/// `count` equally spaced interior points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngStream;
    use proptest::prelude::*;

    // Brute-force scan: smallest sample value x with F_n(x) >= u.
    fn brute_force_quantile(sample: &[f64], u: f64) -> f64 {
        let n = sample.len() as f64;
        let mut candidates = sample.to_vec();
        candidates.sort_by(f64::total_cmp);
        for x in candidates {
            let fx = sample.iter().filter(|&&s| s <= x).count() as f64 / n;
            if fx >= u {
                return x;
            }
        }
        unreachable!()
    }

    #[test]
    fn middle_order_statistic() {
        assert_eq!(empirical_quantile(&[3.0, 1.0, 2.0], 0.5).unwrap(), 2.0);
    }

    #[test]
    fn ceil_rule() {
        let s = [3.0, 1.0, 2.0];
        assert_eq!(brute_force_quantile(&s, 0.34), 2.0);
        assert_eq!(empirical_quantile(&s, 0.34).unwrap(), 2.0);
    }

    #[test]
    fn single_point() {
        assert_eq!(empirical_quantile(&[5.0], 0.99).unwrap(), 5.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(empirical_quantile(&[], 0.5), Err(Error::Domain(_))));
        assert!(matches!(empirical_quantile(&[1.0], 0.0), Err(Error::Domain(_))));
        assert!(matches!(empirical_quantile(&[1.0], 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn exact_fractions() {
        let s = [1.0, 2.0, 3.0];
        assert_eq!(empirical_quantile(&s, 1.0 / 3.0).unwrap(), 1.0);
        assert_eq!(empirical_quantile(&s, 2.0 / 3.0).unwrap(), 2.0);
    }

    #[test]
    fn quantile_transform_reproduces_ecdf() {
        let mut rng = RngStream::new(5, 0);
        let n = 10_000;
        let sample: Vec<f64> = (0..n).map(|_| rng.open01().ln()).collect();
        let q = QuantileFn::empirical(&sample).unwrap();
        let mut draws: Vec<f64> = (0..n).map(|_| q.eval(rng.open01())).collect();
        draws.sort_by(f64::total_cmp);
        let mut sorted = sample.clone();
        sorted.sort_by(f64::total_cmp);
        let ks = crate::numerics::stats::ks_two_sample_sorted(&draws, &sorted);
        assert!(ks < 0.02, "{ks}");
    }

    proptest! {
        #[test]
        fn matches_brute_force(sample in prop::collection::vec(-100i32..100, 1..40), u in 0.001f64..0.999) {
            let s: Vec<f64> = sample.iter().map(|&v| v as f64).collect();
            prop_assert_eq!(empirical_quantile(&s, u).unwrap(), brute_force_quantile(&s, u));
        }

        #[test]
        fn empirical_is_monotone(sample in prop::collection::vec(-1e3f64..1e3, 1..60)) {
            let q = QuantileFn::empirical(&sample).unwrap();
            prop_assert!(q.is_monotone_on(&default_grid()));
        }
    }
}
