//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every Monte Carlo quantity uses the fixed root seed below. Criteria 1-10 run
//! on a four-thread pool; criterion 11 re-runs them on a single thread and
//! compares the serialized artifacts byte for byte.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use semieff::diagnostics::{
    excess_variance, las_spread_check, lan_check, regularity_check, replicate, ecdf_cramer_rao_check, CheckSettings,
    LocalAlternative, McReport,
};
use semieff::estimators::{
    EstimatorKind, EstimatorPipeline, PipelineConfig, PreliminaryKind, ScoreEstimator, ScoreKind, SplitPlan,
    Splitting,
};
use semieff::geometry::{compare_bounds, efficient_score};
use semieff::models::{
    CoxModel, CovariateLaw, ExponentialShiftModel, LocationFamily, LocationModel, Normal, ParametricModel,
};
use semieff::numerics::rng::experiment_id;
use semieff::numerics::stats::{self, median, normal_pdf, normal_quantile};
use semieff::spread::{
    is_more_spread, spread_bound_from_score, spread_equality_residual, trigonometric_bound, van_zwet_bound,
    NormalConjugate, ScoreStatistic,
};
use semieff::timeseries::{adaptive_ar1_estimate, simulate_ar1, ts_lan_remainder};
use semieff::RngStream;

const SEED: u64 = 20261018;

struct Outcome {
    pass: bool,
    detail: String,
    /// Serialized numerical output compared across worker counts.
    artifact: String,
}

impl Outcome {
    fn new(pass: bool, detail: String, artifact: String) -> Self {
        Self { pass, detail, artifact }
    }
}

fn stream(name: &str) -> RngStream {
    RngStream::new(SEED, experiment_id(name) as u64)
}

fn json(reports: &[&McReport]) -> String {
    reports.iter().map(|r| r.to_json().unwrap()).collect::<Vec<_>>().join("\n")
}

// Composite Simpson rule, independent of the library's adaptive quadrature.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

fn c1_spread_oracle() -> Outcome {
    let k = spread_bound_from_score(&ScoreStatistic::normal(1.0), 1e-10, &mut stream("acc/1")).unwrap();
    let (mut err_identity, mut err_quad) = (0.0f64, 0.0f64);
    let mut table = Vec::new();
    for i in 1..=99 {
        let u = i as f64 / 100.0;
        let got = k.eval(u);
        // K^{-1}(u) = int_{1/2}^u ds / phi(Phi^{-1}(s)).
        let oracle = simpson(|s| 1.0 / normal_pdf(normal_quantile(s)), 0.5, u, 2000);
        err_identity = err_identity.max((got - normal_quantile(u)).abs());
        err_quad = err_quad.max((got - oracle).abs());
        table.push(got);
    }
    let pass = err_identity <= 1e-4 && err_quad <= 1e-4;
    Outcome::new(
        pass,
        format!("sup|K^-1 - Phi^-1| = {err_identity:.2e}, sup|K^-1 - quadrature| = {err_quad:.2e} (tol 1e-4)"),
        format!("{table:?}"),
    )
}

fn c2_bound_hierarchy() -> Outcome {
    let vz = van_zwet_bound(1.0).unwrap();
    let trig = trigonometric_bound(1.0).unwrap();
    let normal = spread_bound_from_score(&ScoreStatistic::normal(1.0), 1e-10, &mut stream("acc/2")).unwrap();
    let worst_env = (1..1000)
        .map(|i| {
            let s = i as f64 / 1000.0;
            trig.density_at_level(s) - vz.density_at_level(s)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let grid: Vec<f64> = (1..=99).map(|i| i as f64 / 100.0).collect();
    let over_vz = is_more_spread(normal.k_inverse(), vz.k_inverse(), &grid, 1e-9);
    let over_trig = is_more_spread(normal.k_inverse(), trig.k_inverse(), &grid, 1e-9);
    let pass = worst_env <= 1e-12 && over_vz.holds && over_trig.holds;
    Outcome::new(
        pass,
        format!(
            "max(trig - vanzwet envelope) = {worst_env:.2e}; increment excess over normal: vanzwet {:.2e}, trig {:.2e}",
            over_vz.worst_violation, over_trig.worst_violation
        ),
        format!("{worst_env} {over_vz:?} {over_trig:?}"),
    )
}

fn c3_attainment() -> Outcome {
    let c = NormalConjugate::new(0.0, 1.0, 1.0, 1).unwrap();
    let draws = replicate(SEED, "acc/3", 10_000, |rng| {
        let (theta, xs) = c.draw_joint(rng);
        Ok((c.statistic(&xs, theta)?, c.posterior_mean(&xs) - theta, rng.standard_normal()))
    })
    .unwrap();
    let bayes: Vec<(f64, f64)> = draws.iter().map(|d| (d.0, d.1)).collect();
    let indep: Vec<(f64, f64)> = draws.iter().map(|d| (d.0, d.2)).collect();
    let (rb, ri) = (spread_equality_residual(&bayes), spread_equality_residual(&indep));
    let pass = rb < 0.01 && (ri - 1.0 / 3.0).abs() <= 0.02;
    Outcome::new(
        pass,
        format!("posterior-mean residual {rb:.4} (< 0.01); independent residual {ri:.4} (1/3 +- 0.02)"),
        format!("{rb} {ri}"),
    )
}

fn c4_lan() -> Outcome {
    let s = CheckSettings::default();
    let grid = [100, 1000, 10_000];
    let normal = LocationModel::new(LocationFamily::normal());
    let laplace = LocationModel::new(LocationFamily::laplace());
    let alt = LocalAlternative::new(vec![0.0], vec![1.0]).unwrap();
    let rn = lan_check(&normal, &alt, &grid, 200, SEED, &s).unwrap();
    let rl = lan_check(&laplace, &alt, &grid, 200, SEED, &s).unwrap();
    let re = lan_check(&ExponentialShiftModel, &alt, &grid, 200, SEED, &s).unwrap();

    let max_normal = grid
        .iter()
        .map(|&n| rn.cell("max_abs_R_n", n).unwrap().value.unwrap())
        .fold(0.0, f64::max);
    let meds: Vec<f64> = grid.iter().map(|&n| rl.cell("R_n", n).unwrap().value.unwrap()).collect();
    let strictly = meds.windows(2).all(|w| w[1] < w[0]);
    let pass = max_normal <= 1e-10 && strictly && rl.all_passed() && !re.all_passed();
    Outcome::new(
        pass,
        format!(
            "normal max|R_n| = {max_normal:.1e}; laplace median|R_n| = {:.4}/{:.4}/{:.4}; expshift all_passed = {}",
            meds[0],
            meds[1],
            meds[2],
            re.all_passed()
        ),
        json(&[&rn, &rl, &re]),
    )
}

fn c5_information_geometry() -> Outcome {
    let cox = CoxModel::new(CovariateLaw::scalar(1.0, 1.0).unwrap()).unwrap();
    let theta = [0.0, 1.0];
    let cmp = compare_bounds(&cox, &theta, 1).unwrap();
    let (restricted, full) = (cmp.restricted_bound[0][0], cmp.full_bound[0][0]);
    let model: Arc<dyn ParametricModel> = Arc::new(cox);
    let eff = efficient_score(model.clone(), 1).unwrap().at(&theta).unwrap();
    let xs = model.sample(&theta, 100_000, &mut stream("acc/5")).unwrap();
    let mut formula_err = 0.0f64;
    let (mut sq, mut cross) = (Vec::new(), Vec::new());
    for x in &xs {
        let e = eff.eval(x).unwrap()[0];
        let z = x.z[0];
        let oracle = (z - 1.0) * (1.0 - (z * theta[0]).exp() * theta[1] * x.y);
        formula_err = formula_err.max((e - oracle).abs());
        sq.push(e * e);
        cross.push(e * model.score(x, &theta).unwrap()[1]);
    }
    let orth = stats::mean(&cross).abs();
    let orth_se = stats::mean_stderr(&cross);
    let var_gap = (stats::mean(&sq) - 1.0).abs();
    let var_se = stats::mean_stderr(&sq);
    let pass = (restricted - 0.5).abs() < 1e-12
        && (full - 1.0).abs() < 1e-12
        && formula_err < 1e-10
        && orth <= 3.0 * orth_se
        && var_gap <= 3.0 * var_se;
    Outcome::new(
        pass,
        format!(
            "restricted {restricted}, full {full}; |E l*l2| = {orth:.4} (3se {:.4}); |E l*^2 - 1| = {var_gap:.4} (3se {:.4})",
            3.0 * orth_se,
            3.0 * var_se
        ),
        format!("{restricted} {full} {orth} {var_gap}"),
    )
}

fn c6_one_step() -> Outcome {
    let cox: Arc<dyn ParametricModel> = Arc::new(CoxModel::new(CovariateLaw::scalar(1.0, 1.0).unwrap()).unwrap());
    let cfg = PipelineConfig {
        discretize: true,
        ..PipelineConfig::default()
    };
    let p = EstimatorPipeline::new(cox.clone(), cfg).unwrap();
    let r = excess_variance(cox.as_ref(), &p, &[0.0, 1.0], 4000, 500, SEED, &CheckSettings::default()).unwrap();
    let var = r.cell("coord[0]", 4000).unwrap().variance;
    let rel = (var - 1.0).abs();

    // Normal location: the one-step from the sample mean is the sample mean.
    let loc: Arc<dyn ParametricModel> = Arc::new(LocationModel::new(LocationFamily::normal()));
    let cfg = PipelineConfig {
        preliminary: PreliminaryKind::Mean,
        ..PipelineConfig::default()
    };
    let p = EstimatorPipeline::new(loc.clone(), cfg).unwrap();
    let diffs = replicate(SEED, "acc/6/normal", 50, |rng| {
        let xs = loc.sample(&[0.7], 500, rng)?;
        let ys: Vec<f64> = xs.iter().map(|x| x.y).collect();
        Ok((p.estimate(&xs)?[0] - stats::mean(&ys)).abs())
    })
    .unwrap();
    let worst = diffs.iter().copied().fold(0.0, f64::max);
    let pass = rel <= 0.15 && worst <= 1e-12;
    Outcome::new(
        pass,
        format!("cox Var(sqrt n (nu^ - nu)) = {var:.4} (1.0 +- 15%); normal one-step vs mean max diff {worst:.1e}"),
        json(&[&r]),
    )
}

fn c7_adaptation() -> Outcome {
    let cfg = PipelineConfig {
        preliminary: PreliminaryKind::MEstimator,
        discretize: true,
        splitting: Splitting::FourWay,
        score: ScoreKind::Kernel,
        ..PipelineConfig::default()
    };
    let mut details = Vec::new();
    let mut reports = Vec::new();
    let mut pass = true;
    for g in [LocationFamily::normal(), LocationFamily::laplace()] {
        let name = g.name().to_string();
        let target = 1.0 / g.fisher_location();
        let model: Arc<dyn ParametricModel> = Arc::new(LocationModel::new(g));
        let p = EstimatorPipeline::new(model.clone(), cfg.clone()).unwrap();
        let r = excess_variance(model.as_ref(), &p, &[0.0], 8000, 500, SEED, &CheckSettings::default()).unwrap();
        let var = r.cell("coord[0]", 8000).unwrap().variance;
        let ok = (var / target - 1.0).abs() <= 0.20;
        pass &= ok;
        details.push(format!("{name}: {var:.4} vs {target:.4}"));
        reports.push(r);
    }
    Outcome::new(
        pass,
        format!("Var(sqrt n (theta^ - theta)) {} (+- 20%)", details.join(", ")),
        json(&reports.iter().collect::<Vec<_>>()),
    )
}

fn c8_time_series() -> Outcome {
    let rho = 0.5;
    let n = 8000;
    let est = ScoreEstimator::symmetric_location();
    let plan = SplitPlan::default();
    let mut details = Vec::new();
    let mut artifact = String::new();
    let mut pass = true;
    for g in [LocationFamily::normal(), LocationFamily::laplace_unit_variance()] {
        let name = g.name().to_string();
        let target = (1.0 - rho * rho) / (g.fisher_location() * g.variance());
        let errs = replicate(SEED, &format!("acc/8/{name}"), 400, |rng| {
            let path = simulate_ar1(rho, n, &g, rng)?;
            let a = adaptive_ar1_estimate(&path, &est, &plan, 1.0)?;
            Ok((n as f64).sqrt() * (a.estimate - rho))
        })
        .unwrap();
        let var = stats::variance(&errs);
        let ok = (var / target - 1.0).abs() <= 0.20;
        pass &= ok;
        details.push(format!("{name}: {var:.4} vs {target:.4}"));
        artifact.push_str(&format!("{errs:?}\n"));
    }
    let g = LocationFamily::normal();
    let meds: Vec<f64> = [100, 1000, 10_000]
        .iter()
        .map(|&m| {
            let r = replicate(SEED, &format!("acc/8/lan/{m}"), 200, |rng| {
                let path = simulate_ar1(rho, m, &g, rng)?;
                Ok(ts_lan_remainder(&path, rho, 1.0, &g)?.abs())
            })
            .unwrap();
            median(&r)
        })
        .collect();
    let decays = meds.windows(2).all(|w| w[1] < w[0]);
    pass &= decays;
    artifact.push_str(&format!("{meds:?}"));
    Outcome::new(
        pass,
        format!(
            "Var(sqrt n (rho^ - rho)) {} (+- 20%); LAN medians {:.2e}/{:.2e}/{:.2e}",
            details.join(", "),
            meds[0],
            meds[1],
            meds[2]
        ),
        artifact,
    )
}

fn c9_ecdf() -> Outcome {
    let t_grid: Vec<f64> = (1..=9).map(|i| normal_quantile(i as f64 / 10.0)).collect();
    let r = ecdf_cramer_rao_check(&Normal { sd: 1.0 }, &t_grid, 100, 10_000, SEED, &CheckSettings::default()).unwrap();
    let failed: Vec<&str> = r.verdicts.iter().filter(|v| !v.passed).map(|v| v.check.as_str()).collect();
    Outcome::new(
        failed.is_empty(),
        format!("{} verdicts, failing: {:?}", r.verdicts.len(), failed),
        json(&[&r]),
    )
}

fn c10_regularity() -> Outcome {
    let s = CheckSettings::default();
    let model: Arc<dyn ParametricModel> = Arc::new(LocationModel::new(LocationFamily::normal()));
    let pipeline = |kind: PreliminaryKind| {
        let cfg = PipelineConfig {
            estimator: EstimatorKind::PreliminaryOnly,
            preliminary: kind,
            constant: Some(vec![0.0]),
            ..PipelineConfig::default()
        };
        EstimatorPipeline::new(model.clone(), cfg).unwrap()
    };
    let alt = LocalAlternative::new(vec![0.0], vec![1.0]).unwrap();
    let constant = pipeline(PreliminaryKind::Constant);
    let rc = regularity_check(model.as_ref(), &constant, &alt, 400, 1000, SEED, &s).unwrap();
    let rm = regularity_check(model.as_ref(), &pipeline(PreliminaryKind::Mean), &alt, 400, 1000, SEED, &s).unwrap();
    let rd = las_spread_check(model.as_ref(), &constant, &[0.0], &[1.0], 400, 500, SEED, &s).unwrap();
    let cell = rd.cell("estimator", 400).unwrap();
    let order = rd.verdict("las_spread_order").unwrap();
    let pass = !rc.all_passed() && rm.all_passed() && cell.variance == 0.0 && cell.iqr == 0.0 && order.informational;
    Outcome::new(
        pass,
        format!(
            "constant KS {:.3}, mean KS {:.3} (crit {:.3}); degenerate spread {} (informational {})",
            rc.verdicts[0].statistic, rm.verdicts[0].statistic, rm.verdicts[0].threshold, cell.iqr, order.informational
        ),
        json(&[&rc, &rm, &rd]),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn in_pool(threads: usize, f: fn() -> Outcome) -> Outcome {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 spread-bound oracle", c1_spread_oracle),
        ("2 bound hierarchy", c2_bound_hierarchy),
        ("3 attainment", c3_attainment),
        ("4 LAN", c4_lan),
        ("5 information geometry", c5_information_geometry),
        ("6 one-step efficiency", c6_one_step),
        ("7 semiparametric adaptation", c7_adaptation),
        ("8 time series", c8_time_series),
        ("9 ECDF Cramer-Rao", c9_ecdf),
        ("10 regularity diagnostics", c10_regularity),
    ];
    let mut all = true;
    let mut artifacts = Vec::new();
    for (name, f) in criteria {
        let start = Instant::now();
        let o = in_pool(4, f);
        all &= o.pass;
        println!(
            "{} criterion {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        artifacts.push(o.artifact);
    }

    let start = Instant::now();
    let differing: Vec<&str> = criteria
        .iter()
        .zip(&artifacts)
        .filter(|((_, f), a)| in_pool(1, *f).artifact != **a)
        .map(|((name, _), _)| *name)
        .collect();
    let pass = differing.is_empty();
    all &= pass;
    println!(
        "{} criterion 11 determinism: 4 threads vs 1 thread, differing criteria {:?} [{:.1}s]",
        if pass { "PASS" } else { "FAIL" },
        differing,
        start.elapsed().as_secs_f64()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
