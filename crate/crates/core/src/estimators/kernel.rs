//! Kernel estimates of the location score `-g'/g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LocalInfluence;
use crate::models::Observation;
use crate::numerics::kde::kde_score_sorted;
use crate::numerics::linalg::{spd_inverse, Matrix, Vector};
use crate::numerics::stats;

/// Points in the interpolation table of a fitted score.
const TABLE_POINTS: usize = 512;
/// Kernel support, in bandwidths, used for windowing and for the table range.
const WINDOW: f64 = 8.0;

/// Bandwidth for the kernel density of the residuals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandwidthRule {
    /// `factor * 1.06 * sd * m^(-1/5)` on an auxiliary block of size `m`.
    Silverman { factor: f64 },
    Fixed { h: f64 },
}

impl Default for BandwidthRule {
    fn default() -> Self {
        BandwidthRule::Silverman { factor: 1.0 }
    }
}

/// Clamp level `a_m` for the fitted score.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationRule {
    /// `factor * log(m)`.
    Log { factor: f64 },
    Fixed { level: f64 },
}

impl Default for TruncationRule {
    fn default() -> Self {
        TruncationRule::Log { factor: 2.0 }
    }
}

/// How residuals and regressors are read off an observation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualKind {
    /// `y - theta`, symmetric errors: residuals are pooled with their negatives.
    SymmetricLocation,
    /// `y - theta'z`.
    Regression,
}

/// A fitted, clamped score `e -> clamp(-g'/g(e), +-a)` and the estimated
/// information `mean clamp(...)^2` over the fitting residuals.
#[derive(Clone, Debug)]
pub struct FittedScore {
    sorted: Vec<f64>,
    bandwidth: f64,
    level: f64,
    odd: bool,
    lo: f64,
    step: f64,
    table: Vec<f64>,
    information: f64,
}

impl FittedScore {
    /// Fits the score of the residuals `eps`; with `symmetrize` the kernel
    /// estimate is built from `eps` pooled with `-eps` and the result is odd.
    pub fn fit(eps: &[f64], bandwidth: BandwidthRule, truncation: TruncationRule, symmetrize: bool) -> Result<Self> {
        let m = eps.len();
        if m < 2 {
            return Err(Error::estimation("score estimation needs at least two residuals"));
        }
        if !(stats::variance(eps) > 0.0) {
            return Err(Error::estimation("residuals are degenerate (zero variance)"));
        }
        let mut sorted: Vec<f64> = eps.to_vec();
        if symmetrize {
            sorted.extend(eps.iter().map(|e| -e));
        }
        sorted.sort_by(f64::total_cmp);
        let sd = stats::variance(&sorted).sqrt();
        if !(sd > 0.0) || !sd.is_finite() {
            return Err(Error::estimation("residuals are degenerate (zero variance)"));
        }
        let h = match bandwidth {
            BandwidthRule::Silverman { factor } => factor * 1.06 * sd * (m as f64).powf(-0.2),
            BandwidthRule::Fixed { h } => h,
        };
        let level = match truncation {
            TruncationRule::Log { factor } => factor * (m as f64).ln(),
            TruncationRule::Fixed { level } => level,
        };
        if !(h > 0.0 && level > 0.0) {
            return Err(Error::domain("bandwidth and truncation level must be positive"));
        }
        let (lo, hi) = if symmetrize {
            (0.0, sorted[sorted.len() - 1] + WINDOW * h)
        } else {
            (sorted[0] - WINDOW * h, sorted[sorted.len() - 1] + WINDOW * h)
        };
        let step = (hi - lo) / (TABLE_POINTS - 1) as f64;
        let mut out = Self {
            sorted,
            bandwidth: h,
            level,
            odd: symmetrize,
            lo,
            step,
            table: Vec::new(),
            information: f64::NAN,
        };
        out.table = (0..TABLE_POINTS)
            .map(|i| {
                if symmetrize && i == 0 {
                    0.0
                } else {
                    out.direct(lo + i as f64 * step)
                }
            })
            .collect();
        let sq: Vec<f64> = eps.iter().map(|&e| out.eval(e).powi(2)).collect();
        out.information = stats::mean(&sq);
        if !(out.information > 0.0) {
            return Err(Error::estimation("estimated information is zero"));
        }
        Ok(out)
    }

    fn direct(&self, e: f64) -> f64 {
        kde_score_sorted(&self.sorted, self.bandwidth, e, WINDOW * self.bandwidth).clamp(-self.level, self.level)
    }

    fn lookup(&self, e: f64) -> f64 {
        let pos = (e - self.lo) / self.step;
        if pos < 0.0 || pos > (TABLE_POINTS - 1) as f64 {
            return self.direct(e);
        }
        let i = (pos.floor() as usize).min(TABLE_POINTS - 2);
        let w = pos - i as f64;
        (1.0 - w) * self.table[i] + w * self.table[i + 1]
    }

    /// Clamped score estimate at residual `e`.
    pub fn eval(&self, e: f64) -> f64 {
        if self.odd {
            if e < 0.0 {
                -self.lookup(-e)
            } else {
                self.lookup(e)
            }
        } else {
            self.lookup(e)
        }
    }

    pub fn information(&self) -> f64 {
        self.information
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn truncation_level(&self) -> f64 {
        self.level
    }
}

/// Fits an influence function from an auxiliary sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreEstimator {
    pub residuals: ResidualKind,
    #[serde(default)]
    pub bandwidth: BandwidthRule,
    #[serde(default)]
    pub truncation: TruncationRule,
}

impl ScoreEstimator {
    pub fn symmetric_location() -> Self {
        Self {
            residuals: ResidualKind::SymmetricLocation,
            bandwidth: BandwidthRule::default(),
            truncation: TruncationRule::default(),
        }
    }

    pub fn regression() -> Self {
        Self {
            residuals: ResidualKind::Regression,
            bandwidth: BandwidthRule::default(),
            truncation: TruncationRule::default(),
        }
    }

    fn residual(&self, x: &Observation, theta: &[f64]) -> Result<f64> {
        match self.residuals {
            ResidualKind::SymmetricLocation => {
                if theta.len() != 1 {
                    return Err(Error::domain("location parameter is scalar"));
                }
                Ok(x.y - theta[0])
            }
            ResidualKind::Regression => {
                if x.z.len() != theta.len() {
                    return Err(Error::domain("covariate and parameter dimensions differ"));
                }
                Ok(x.y - x.z.iter().zip(theta).map(|(z, t)| z * t).sum::<f64>())
            }
        }
    }

    /// Fits the clamped score of raw residuals, pooling with `-eps` for the
    /// symmetric-location kind.
    pub fn fit_residuals(&self, eps: &[f64]) -> Result<FittedScore> {
        let symmetric = self.residuals == ResidualKind::SymmetricLocation;
        FittedScore::fit(eps, self.bandwidth, self.truncation, symmetric)
    }

    /// The fitted influence at `theta`, built from `aux` only. Its covariance
    /// is the estimated information bound.
    pub fn fit(&self, aux: &[Observation], theta: &[f64]) -> Result<LocalInfluence> {
        let eps = aux.iter().map(|x| self.residual(x, theta)).collect::<Result<Vec<f64>>>()?;
        let score = self.fit_residuals(&eps)?;
        let me = *self;
        let th = theta.to_vec();
        match self.residuals {
            ResidualKind::SymmetricLocation => {
                let info = score.information();
                Ok(LocalInfluence::new(
                    move |x| Ok(Vector::from_element(1, score.eval(me.residual(x, &th)?) / info)),
                    Matrix::from_element(1, 1, 1.0 / info),
                ))
            }
            ResidualKind::Regression => {
                let k = theta.len();
                let mut szz = Matrix::zeros(k, k);
                for x in aux {
                    let z = Vector::from_column_slice(&x.z);
                    szz += &z * z.transpose();
                }
                szz /= aux.len() as f64;
                let bound = spd_inverse(&(szz * score.information()))?;
                let w = bound.clone();
                Ok(LocalInfluence::new(
                    move |x| {
                        let s = score.eval(me.residual(x, &th)?);
                        Ok(&w * Vector::from_column_slice(&x.z) * s)
                    },
                    bound,
                ))
            }
        }
    }
}
