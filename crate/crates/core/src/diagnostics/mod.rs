//! Seeded Monte Carlo checks tying estimators to their bounds.
//!
//! Every replication draws from its own [`RngStream`], keyed on the root seed,
//! a stream name and the replication index. Replications run in parallel but
//! are collected in index order and reduced with pairwise sums, so a report
//! depends only on its inputs and never on the number of worker threads.

mod checks;
mod ecdf;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ParametricModel;
use crate::numerics::quantile::empirical_quantile;
use crate::numerics::rng::{experiment_id, RngStream};
use crate::numerics::stats;

pub use checks::{excess_variance, lan_check, las_spread_check, regularity_check};
pub use ecdf::ecdf_cramer_rao_check;

/// Thresholds used by the checks. All of them may be overridden from a config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSettings {
    /// Allowed relative increase between successive LAN remainder medians.
    pub lan_slack: f64,
    /// Remainders below this are treated as exactly zero.
    pub exact_tol: f64,
    /// Relative tolerance for near-equality of quantile increments.
    pub near_equality_tol: f64,
    /// Multiplier applied to Monte Carlo standard errors.
    pub stderr_multiplier: f64,
    /// Level of the two-sample KS test.
    pub ks_alpha: f64,
    /// Bootstrap resamples used to size the spread-order slack.
    pub bootstrap_resamples: usize,
    /// Half-width of the uniform noise added to the ECDF competitor.
    pub ecdf_noise: f64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self {
            lan_slack: 0.10,
            exact_tol: 1e-10,
            near_equality_tol: 0.10,
            stderr_multiplier: 3.0,
            ks_alpha: 0.01,
            bootstrap_resamples: 200,
            ecdf_noise: 0.1,
        }
    }
}

/// Summary of one set of replicated values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub label: String,
    pub n: usize,
    pub reps: usize,
    pub mean: f64,
    pub variance: f64,
    pub mean_stderr: f64,
    pub variance_stderr: f64,
    /// `G^{-1}(0.75) - G^{-1}(0.25)` of the replicated values.
    pub iqr: f64,
    /// `G^{-1}(0.9) - G^{-1}(0.1)`.
    pub spread_10_90: f64,
    /// Check-specific statistic for this cell.
    pub value: Option<f64>,
    /// The bound or target the statistic is compared with.
    pub reference: Option<f64>,
}

impl Cell {
    pub fn from_values(label: impl Into<String>, n: usize, values: &[f64]) -> Self {
        let q = |u: f64| empirical_quantile(values, u).unwrap_or(f64::NAN);
        let many = values.len() > 1;
        Self {
            label: label.into(),
            n,
            reps: values.len(),
            mean: if values.is_empty() { f64::NAN } else { stats::mean(values) },
            variance: if many { stats::variance(values) } else { f64::NAN },
            mean_stderr: if many { stats::mean_stderr(values) } else { f64::NAN },
            variance_stderr: if many { stats::variance_stderr(values) } else { f64::NAN },
            iqr: q(0.75) - q(0.25),
            spread_10_90: q(0.9) - q(0.1),
            value: None,
            reference: None,
        }
    }

    /// A cell carrying a single statistic and no replicated values.
    pub fn scalar(label: impl Into<String>, n: usize, value: f64) -> Self {
        Self::from_values(label, n, &[]).with_value(value)
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }

    pub fn with_reference(mut self, r: f64) -> Self {
        self.reference = Some(r);
        self
    }
}

/// Outcome of one comparison. `margin` is positive on the passing side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub margin: f64,
    /// Informational verdicts are reported but do not count towards [`McReport::all_passed`].
    pub informational: bool,
}

impl Verdict {
    /// Passes when `statistic <= threshold`.
    pub fn at_most(check: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        let margin = threshold - statistic;
        Self {
            check: check.into(),
            passed: margin >= 0.0,
            statistic,
            threshold,
            margin: if margin.is_nan() { f64::NEG_INFINITY } else { margin },
            informational: false,
        }
    }

    /// Passes when `statistic >= threshold`.
    pub fn at_least(check: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        let margin = statistic - threshold;
        Self {
            check: check.into(),
            passed: margin >= 0.0,
            statistic,
            threshold,
            margin: if margin.is_nan() { f64::NEG_INFINITY } else { margin },
            informational: false,
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

/// Result of a Monte Carlo check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub experiment_id: String,
    pub seed: u64,
    pub n_grid: Vec<usize>,
    pub reps: Vec<usize>,
    pub cells: Vec<Cell>,
    pub verdicts: Vec<Verdict>,
}

impl McReport {
    pub fn new(experiment_id: impl Into<String>, seed: u64) -> Self {
        Self {
            experiment_id: experiment_id.into(),
            seed,
            n_grid: Vec::new(),
            reps: Vec::new(),
            cells: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed || v.informational)
    }

    pub fn cell(&self, label: &str, n: usize) -> Option<&Cell> {
        self.cells.iter().find(|c| c.label == label && c.n == n)
    }

    pub fn verdict(&self, check: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }

    /// Merges several reports into one, e.g. for a config listing several checks.
    pub fn combine(experiment_id: impl Into<String>, seed: u64, reports: Vec<McReport>) -> Self {
        let mut out = Self::new(experiment_id, seed);
        for r in reports {
            for n in r.n_grid {
                if !out.n_grid.contains(&n) {
                    out.n_grid.push(n);
                }
            }
            out.reps.extend(r.reps);
            out.cells.extend(r.cells.into_iter().map(|mut c| {
                c.label = format!("{}/{}", r.experiment_id, c.label);
                c
            }));
            out.verdicts.extend(r.verdicts.into_iter().map(|mut v| {
                v.check = format!("{}/{}", r.experiment_id, v.check);
                v
            }));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    /// Flat CSV with one row per cell followed by one row per verdict.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record([
            "experiment_id",
            "kind",
            "label",
            "n",
            "reps",
            "mean",
            "variance",
            "mean_stderr",
            "variance_stderr",
            "iqr",
            "spread_10_90",
            "value",
            "reference",
            "passed",
            "margin",
        ])
        .map_err(io)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for c in &self.cells {
            w.write_record([
                self.experiment_id.clone(),
                "cell".into(),
                c.label.clone(),
                c.n.to_string(),
                c.reps.to_string(),
                c.mean.to_string(),
                c.variance.to_string(),
                c.mean_stderr.to_string(),
                c.variance_stderr.to_string(),
                c.iqr.to_string(),
                c.spread_10_90.to_string(),
                opt(c.value),
                opt(c.reference),
                String::new(),
                String::new(),
            ])
            .map_err(io)?;
        }
        for v in &self.verdicts {
            let mut row = vec![self.experiment_id.clone(), "verdict".into(), v.check.clone()];
            row.extend(std::iter::repeat_n(String::new(), 8));
            row.extend([
                v.statistic.to_string(),
                v.threshold.to_string(),
                if v.informational { "info".into() } else { v.passed.to_string() },
                v.margin.to_string(),
            ]);
            w.write_record(&row).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `theta_n = theta0 + t / sqrt(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalAlternative {
    pub theta0: Vec<f64>,
    pub t: Vec<f64>,
}

impl LocalAlternative {
    pub fn new(theta0: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        if theta0.len() != t.len() {
            return Err(Error::domain(format!(
                "theta0 has {} coordinates but t has {}",
                theta0.len(),
                t.len()
            )));
        }
        Ok(Self { theta0, t })
    }

    pub fn theta_n(&self, n: usize) -> Vec<f64> {
        let s = (n as f64).sqrt();
        self.theta0.iter().zip(&self.t).map(|(a, b)| a + b / s).collect()
    }

    /// Domain error unless `theta0` and every `theta_n` lie in the model's domain.
    pub fn check(&self, model: &dyn ParametricModel, n_grid: &[usize]) -> Result<()> {
        model.check_theta(&self.theta0)?;
        for &n in n_grid {
            model.check_theta(&self.theta_n(n))?;
        }
        Ok(())
    }
}

/// Runs `f` once per replication on its own stream and returns the results in
/// replication order. The first failing replication (by index) is reported.
pub fn replicate<T, F>(seed: u64, stream: &str, reps: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream) -> Result<T> + Sync,
{
    let id = experiment_id(stream);
    let out: Vec<Result<T>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::for_replication(seed, id, r as u32);
            f(&mut rng)
        })
        .collect();
    out.into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::Replication {
                index,
                message: format!("{stream}: {e}"),
            })
        })
        .collect()
}
