//! LAN remainder, spread order, regularity and excess-variance checks.

use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, EstimatorPipeline};
use crate::models::{Observation, ParametricModel};
use crate::numerics::linalg::{min_eigenvalue, spd_inverse, symmetrize, Matrix, Vector};
use crate::numerics::quantile::QuantileFn;
use crate::numerics::rng::{experiment_id, RngStream};
use crate::numerics::stats::{self, ks_critical_value, ks_two_sample, median, pairwise_sum};
use crate::spread::{is_more_spread, spread_bound_from_score, ScoreStatistic, SpreadBound};

use super::{replicate, Cell, CheckSettings, LocalAlternative, McReport, Verdict};

const INFO_DRAWS: usize = 100_000;

/// Fisher information at `theta`, or the Monte Carlo second moment of the
/// pointwise score when the model does not provide one.
fn information(model: &dyn ParametricModel, theta: &[f64], seed: u64, stream: &str) -> Result<Matrix> {
    match model.fisher(theta) {
        Err(Error::NotRegular(_)) => {
            let k = model.dim();
            let mut rng = RngStream::new(seed, experiment_id(stream) as u64);
            let xs = model.sample(theta, INFO_DRAWS, &mut rng)?;
            let scores = xs.iter().map(|x| model.score(x, theta)).collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_fn(k, k, |i, j| {
                let p: Vec<f64> = scores.iter().map(|s| s[i] * s[j]).collect();
                stats::mean(&p)
            }))
        }
        other => other,
    }
}

/// Distribution of the LAN remainder
/// `R_n = [L_n(theta_n) - L_n(theta0)] - [t' S_n - t' I t / 2]` under `theta0`.
///
/// Passes when the remainder is zero to `exact_tol` in every replication, or
/// when the median `|R_n|` decreases along the grid: no step may grow by more
/// than `lan_slack` and the last median must be below `1 - lan_slack` times the first.
/// Infinite log-likelihood ratios count as failures.
pub fn lan_check(
    model: &dyn ParametricModel,
    alt: &LocalAlternative,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
    settings: &CheckSettings,
) -> Result<McReport> {
    alt.check(model, n_grid)?;
    let id = format!("lan_check:{}", model.name());
    let k = model.dim();
    let info = information(model, &alt.theta0, seed, &format!("{id}/information"))?;
    let t = Vector::from_column_slice(&alt.t);
    let quad = t.dot(&(&info * &t));

    let mut report = McReport::new(&id, seed);
    let mut medians = Vec::new();
    let mut max_abs: f64 = 0.0;
    for &n in n_grid {
        let theta_n = alt.theta_n(n);
        let rs = replicate(seed, &format!("{id}/n={n}"), reps, |rng| {
            let xs = model.sample(&alt.theta0, n, rng)?;
            let mut diffs = Vec::with_capacity(n);
            let mut scores = vec![Vec::with_capacity(n); k];
            for x in &xs {
                diffs.push(model.log_density(x, &theta_n)? - model.log_density(x, &alt.theta0)?);
                let s = model.score(x, &alt.theta0)?;
                for (col, v) in scores.iter_mut().zip(s.iter()) {
                    col.push(*v);
                }
            }
            let sn = scores.iter().zip(&alt.t).map(|(c, tj)| tj * pairwise_sum(c)).sum::<f64>() / (n as f64).sqrt();
            let r = pairwise_sum(&diffs) - (sn - 0.5 * quad);
            Ok(if r.is_nan() { f64::INFINITY } else { r })
        })?;
        let abs: Vec<f64> = rs.iter().map(|r| r.abs()).collect();
        let med = median(&abs);
        let worst = abs.iter().copied().fold(0.0, f64::max);
        max_abs = max_abs.max(worst);
        medians.push(med);
        report.n_grid.push(n);
        report.reps.push(reps);
        report.cells.push(Cell::from_values("R_n", n, &rs).with_value(med));
        report.cells.push(Cell::scalar("max_abs_R_n", n, worst));
    }

    if max_abs <= settings.exact_tol {
        report.verdicts.push(Verdict::at_most("lan_exact", max_abs, settings.exact_tol));
    } else {
        let step = medians
            .windows(2)
            .map(|w| if w[1].is_finite() && w[0] > 0.0 { w[1] / w[0] } else { f64::INFINITY })
            .fold(if medians.iter().all(|m| m.is_finite()) { 0.0 } else { f64::INFINITY }, f64::max);
        report.verdicts.push(Verdict::at_most("lan_stepwise_decay", step, 1.0 + settings.lan_slack));
        if let (Some(first), Some(last)) = (medians.first(), medians.last()) {
            let overall = if last.is_finite() && *first > 0.0 { last / first } else { f64::INFINITY };
            report.verdicts.push(Verdict::at_most("lan_overall_decay", overall, 1.0 - settings.lan_slack));
        }
    }
    Ok(report)
}

fn root_n_errors(pipeline: &EstimatorPipeline, xs: &[Observation], centre: &[f64]) -> Result<Vec<f64>> {
    let t = pipeline.estimate(xs)?;
    let s = (xs.len() as f64).sqrt();
    Ok(t.iter().zip(centre).map(|(a, b)| s * (a - b)).collect())
}

fn check_dims(model: &dyn ParametricModel, pipeline: &EstimatorPipeline, theta0: &[f64]) -> Result<()> {
    model.check_theta(theta0)?;
    if pipeline.dim() != model.dim() {
        return Err(Error::domain(format!(
            "pipeline estimates {} coordinates but {} has {}",
            pipeline.dim(),
            model.name(),
            model.dim()
        )));
    }
    Ok(())
}

fn quantile_levels() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

/// Largest bootstrap standard error of a quantile increment over all grid pairs.
fn bootstrap_increment_stderr(values: &[f64], grid: &[f64], resamples: usize, rng: &mut RngStream) -> Result<f64> {
    let m = values.len();
    if resamples < 2 || m == 0 {
        return Ok(0.0);
    }
    let mut table = Vec::with_capacity(resamples);
    let mut buf = vec![0.0; m];
    for _ in 0..resamples {
        for b in buf.iter_mut() {
            *b = values[(rng.open01() * m as f64) as usize % m];
        }
        let q = QuantileFn::empirical(&buf)?;
        table.push(grid.iter().map(|&u| q.eval(u)).collect::<Vec<_>>());
    }
    let mut worst: f64 = 0.0;
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            let inc: Vec<f64> = table.iter().map(|q| q[j] - q[i]).collect();
            worst = worst.max(stats::variance(&inc).sqrt());
        }
    }
    Ok(worst)
}

/// Compares the law of `sqrt(n) a'(T_n - theta0)` with the normal spread bound
/// of variance `a' I^{-1} a` on the levels `0.05, 0.10, ..., 0.95`.
///
/// The spread-order slack is `stderr_multiplier` times the largest bootstrap
/// standard error of an empirical increment. For one-step pipelines the
/// central increments must also match the bound's to `near_equality_tol`;
/// for other pipelines that comparison is informational. A degenerate
/// estimator (zero spread) yields an informational spread verdict.
#[allow(clippy::too_many_arguments)]
pub fn las_spread_check(
    model: &dyn ParametricModel,
    pipeline: &EstimatorPipeline,
    theta0: &[f64],
    a: &[f64],
    n: usize,
    reps: usize,
    seed: u64,
    settings: &CheckSettings,
) -> Result<McReport> {
    check_dims(model, pipeline, theta0)?;
    if a.len() != model.dim() {
        return Err(Error::domain(format!("direction has {} coordinates, expected {}", a.len(), model.dim())));
    }
    let id = format!("las_spread_check:{}", model.name());
    let av = Vector::from_column_slice(a);
    let bound_var = av.dot(&(spd_inverse(&model.fisher(theta0)?)? * &av));

    let values = replicate(seed, &format!("{id}/n={n}"), reps, |rng| {
        let xs = model.sample(theta0, n, rng)?;
        let e = root_n_errors(pipeline, &xs, theta0)?;
        Ok(e.iter().zip(a).map(|(x, w)| x * w).sum::<f64>())
    })?;

    let grid = quantile_levels();
    let mut rng = RngStream::new(seed, experiment_id(&format!("{id}/bound")) as u64);
    let bound = spread_bound_from_score(&ScoreStatistic::normal(1.0 / bound_var), 1e-10, &mut rng)?;
    let direct = SpreadBound::normal(bound_var)?;
    let agreement = grid.iter().map(|&u| (bound.eval(u) - direct.eval(u)).abs()).fold(0.0, f64::max);

    let g = QuantileFn::empirical(&values)?;
    let spread = stats::variance(&values);
    let mut boot_rng = RngStream::new(seed, experiment_id(&format!("{id}/bootstrap")) as u64);
    let slack = settings.stderr_multiplier
        * bootstrap_increment_stderr(&values, &grid, settings.bootstrap_resamples, &mut boot_rng)?;
    let cmp = is_more_spread(&g, bound.k_inverse(), &grid, slack);

    let ratio = |lo: f64, hi: f64| (g.eval(hi) - g.eval(lo)) / (bound.eval(hi) - bound.eval(lo));
    let (r_iqr, r_wide) = (ratio(0.25, 0.75), ratio(0.1, 0.9));

    let mut report = McReport::new(&id, seed);
    report.n_grid.push(n);
    report.reps.push(reps);
    report.cells.push(
        Cell::from_values("estimator", n, &values)
            .with_value(cmp.worst_violation)
            .with_reference(bound_var),
    );
    report.cells.push(Cell::scalar("increment_ratio_25_75", n, r_iqr).with_reference(1.0));
    report.cells.push(Cell::scalar("increment_ratio_10_90", n, r_wide).with_reference(1.0));
    report.cells.push(Cell::scalar("bound_agreement", n, agreement));

    let order = Verdict::at_most("las_spread_order", cmp.worst_violation, slack);
    report.verdicts.push(if spread > 0.0 { order } else { order.informational() });
    let near = Verdict::at_most(
        "las_near_equality",
        (r_iqr - 1.0).abs().max((r_wide - 1.0).abs()),
        settings.near_equality_tol,
    );
    let efficient = pipeline.config().estimator == EstimatorKind::OneStep;
    report.verdicts.push(if efficient && spread > 0.0 { near } else { near.informational() });
    Ok(report)
}

/// Two-sample KS comparison, coordinatewise, of `sqrt(n)(T_n - theta_n)` under
/// `theta_n` against `sqrt(n)(T_n - theta0)` under `theta0`.
pub fn regularity_check(
    model: &dyn ParametricModel,
    pipeline: &EstimatorPipeline,
    alt: &LocalAlternative,
    n: usize,
    reps: usize,
    seed: u64,
    settings: &CheckSettings,
) -> Result<McReport> {
    check_dims(model, pipeline, &alt.theta0)?;
    alt.check(model, &[n])?;
    let id = format!("regularity_check:{}", model.name());
    let theta_n = alt.theta_n(n);
    let under = |theta: &[f64], stream: String| {
        replicate(seed, &stream, reps, |rng| {
            let xs = model.sample(theta, n, rng)?;
            root_n_errors(pipeline, &xs, theta)
        })
    };
    let at0 = under(&alt.theta0, format!("{id}/theta0/n={n}"))?;
    let atn = under(&theta_n, format!("{id}/theta_n/n={n}"))?;
    let crit = ks_critical_value(settings.ks_alpha, reps, reps);

    let mut report = McReport::new(&id, seed);
    report.n_grid.push(n);
    report.reps.extend([reps, reps]);
    for j in 0..model.dim() {
        let a: Vec<f64> = at0.iter().map(|e| e[j]).collect();
        let b: Vec<f64> = atn.iter().map(|e| e[j]).collect();
        let d = ks_two_sample(&a, &b);
        report.cells.push(Cell::from_values(format!("theta0[{j}]"), n, &a));
        report.cells.push(Cell::from_values(format!("theta_n[{j}]"), n, &b).with_value(d).with_reference(crit));
        report.verdicts.push(Verdict::at_most(format!("regularity_ks[{j}]"), d, crit));
    }
    Ok(report)
}

/// Empirical covariance of `sqrt(n)(T_n - theta0)` minus `I(theta0)^{-1}`.
///
/// Passes when the smallest eigenvalue of the difference is at least
/// `-stderr_multiplier` times the Frobenius norm of the entrywise standard errors.
pub fn excess_variance(
    model: &dyn ParametricModel,
    pipeline: &EstimatorPipeline,
    theta0: &[f64],
    n: usize,
    reps: usize,
    seed: u64,
    settings: &CheckSettings,
) -> Result<McReport> {
    check_dims(model, pipeline, theta0)?;
    let id = format!("excess_variance:{}", model.name());
    let k = model.dim();
    let bound = spd_inverse(&model.fisher(theta0)?)?;
    let errs = replicate(seed, &format!("{id}/n={n}"), reps, |rng| {
        let xs = model.sample(theta0, n, rng)?;
        root_n_errors(pipeline, &xs, theta0)
    })?;
    let cols: Vec<Vec<f64>> = (0..k).map(|j| errs.iter().map(|e| e[j]).collect()).collect();
    let means: Vec<f64> = cols.iter().map(|c| stats::mean(c)).collect();
    let mut cov = Matrix::zeros(k, k);
    let mut se = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let p: Vec<f64> = (0..reps)
                .map(|r| (cols[i][r] - means[i]) * (cols[j][r] - means[j]))
                .collect();
            cov[(i, j)] = stats::covariance(&cols[i], &cols[j]);
            se[(i, j)] = stats::mean_stderr(&p);
        }
    }
    let excess = symmetrize(&(&cov - &bound));
    let lowest = min_eigenvalue(&excess);
    let tol = settings.stderr_multiplier * se.norm();

    let mut report = McReport::new(&id, seed);
    report.n_grid.push(n);
    report.reps.push(reps);
    for (j, c) in cols.iter().enumerate() {
        report.cells.push(
            Cell::from_values(format!("coord[{j}]"), n, c)
                .with_value(excess[(j, j)])
                .with_reference(bound[(j, j)]),
        );
    }
    for i in 0..k {
        for j in i + 1..k {
            report
                .cells
                .push(Cell::scalar(format!("excess[{i},{j}]"), n, excess[(i, j)]).with_reference(bound[(i, j)]));
        }
    }
    report.verdicts.push(Verdict::at_least("no_estimator_beats_bound", lowest, -tol));
    Ok(report)
}
