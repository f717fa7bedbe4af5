//! Variance of the empirical distribution function against its Cramér–Rao bound.

use crate::error::{Error, Result};
use crate::models::ErrorDensity;
use crate::numerics::stats;

use super::{replicate, Cell, CheckSettings, McReport, Verdict};

const EPSILONS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// For each `t` in `t_grid`: the variance of `F_n(t)` over replications against
/// `F(t)(1 - F(t))/n`, a competitor `F_n(t) + U(-c, c)` that must exceed the
/// bound, the covariance identity `Cov(T, F_n(t)) = Var F_n(t)` for that
/// competitor, and nonnegativity of the perturbed density factor
/// `1 - eps (1[x <= t] - F(t))` for `eps` in `[0, 1]`.
pub fn ecdf_cramer_rao_check(
    dist: &dyn ErrorDensity,
    t_grid: &[f64],
    n: usize,
    reps: usize,
    seed: u64,
    settings: &CheckSettings,
) -> Result<McReport> {
    if n == 0 || reps < 2 {
        return Err(Error::domain("ecdf check needs n >= 1 and at least two replications"));
    }
    let id = format!("ecdf_cramer_rao_check:{}", dist.name());
    let c = settings.ecdf_noise;
    // Each replication returns (F_n(t), noise) per grid point.
    let draws = replicate(seed, &format!("{id}/n={n}"), reps, |rng| {
        let xs: Vec<f64> = (0..n).map(|_| dist.sample(rng)).collect();
        Ok(t_grid
            .iter()
            .map(|&t| {
                let f = xs.iter().filter(|&&x| x <= t).count() as f64 / n as f64;
                (f, c * (2.0 * rng.open01() - 1.0))
            })
            .collect::<Vec<_>>())
    })?;

    let mut report = McReport::new(&id, seed);
    report.n_grid.push(n);
    report.reps.push(reps);
    let m = settings.stderr_multiplier;
    for (i, &t) in t_grid.iter().enumerate() {
        let f = dist.cdf(t);
        let bound = f * (1.0 - f) / n as f64;
        let fhat: Vec<f64> = draws.iter().map(|d| d[i].0).collect();
        let comp: Vec<f64> = draws.iter().map(|d| d[i].0 + d[i].1).collect();
        let var = stats::variance(&fhat);
        let var_c = stats::variance(&comp);

        report.cells.push(
            Cell::from_values(format!("ecdf(t={t})"), n, &fhat)
                .with_value(var)
                .with_reference(bound),
        );
        report.cells.push(
            Cell::from_values(format!("competitor(t={t})"), n, &comp)
                .with_value(var_c)
                .with_reference(bound),
        );
        report.verdicts.push(Verdict::at_most(
            format!("ecdf_variance(t={t})"),
            (var - bound).abs(),
            m * stats::variance_stderr(&fhat),
        ));
        report.verdicts.push(Verdict::at_least(
            format!("competitor_exceeds(t={t})"),
            var_c - bound,
            m * stats::variance_stderr(&comp),
        ));
        let mean_f = stats::mean(&fhat);
        let cross: Vec<f64> = draws.iter().map(|d| (d[i].0 - mean_f) * d[i].1).collect();
        report.verdicts.push(Verdict::at_most(
            format!("covariance_identity(t={t})"),
            (stats::covariance(&comp, &fhat) - var).abs(),
            m * stats::mean_stderr(&cross),
        ));

        let lowest = EPSILONS
            .iter()
            .flat_map(|&eps| {
                (0..=400).map(move |j| {
                    let x = -20.0 + 0.1 * j as f64;
                    let ind = if x <= t { 1.0 } else { 0.0 };
                    1.0 - eps * (ind - f)
                })
            })
            .fold(f64::INFINITY, f64::min);
        report.verdicts.push(Verdict::at_least(format!("perturbation_nonnegative(t={t})"), lowest, 0.0));
    }
    Ok(report)
}
