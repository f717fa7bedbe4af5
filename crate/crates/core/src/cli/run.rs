//! Running `estimate` and `check` configs and writing their outputs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use crate::diagnostics::{
    ecdf_cramer_rao_check, excess_variance, las_spread_check, lan_check, regularity_check, replicate,
    LocalAlternative, McReport,
};
use crate::error::{Error, Result};
use crate::estimators::{EstimatorPipeline, ResidualKind, ScoreEstimator};
use crate::models::{build_model, LocationFamily, ParametricModel};
use crate::numerics::linalg::spd_inverse;
use crate::numerics::stats;
use crate::timeseries::{adaptive_ar1_estimate, simulate_ar1, ts_fisher};
use crate::VERSION;

use super::config::{DiagnosticSpec, ExperimentConfig};

/// Comment lines that open every CSV output.
pub(crate) fn header(config_hash: &str, seed: u64) -> String {
    format!("# semieff {VERSION}\n# config_sha256: {config_hash}\n# seed: {seed}\n")
}

#[derive(Serialize)]
struct Header<'a> {
    toolkit: &'static str,
    version: &'static str,
    config_sha256: &'a str,
    seed: u64,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    header: Header<'a>,
    report: &'a McReport,
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_table(path: &Path, head: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(head.as_bytes())?;
    {
        let mut w = csv::Writer::from_writer(&mut f);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(columns).map_err(io)?;
        for r in rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush()?;
    }
    f.flush()?;
    Ok(())
}

fn iid_model(cfg: &ExperimentConfig) -> Result<Arc<dyn ParametricModel>> {
    let model: Arc<dyn ParametricModel> = Arc::from(build_model(&cfg.model.tag, &cfg.model.params)?);
    model.check_theta(&cfg.model.theta)?;
    Ok(model)
}

fn ar1_setup(cfg: &ExperimentConfig) -> Result<(f64, LocationFamily, ScoreEstimator)> {
    let rho = match cfg.model.theta.as_slice() {
        [r] if r.abs() < 1.0 => *r,
        _ => return Err(Error::Config("ar1 takes theta = [rho] with |rho| < 1".into())),
    };
    let g = LocationFamily::by_name(cfg.model.params.errors.as_deref().unwrap_or("normal"))
        .map_err(|e| Error::Config(e.to_string()))?;
    let est = ScoreEstimator {
        residuals: ResidualKind::SymmetricLocation,
        bandwidth: cfg.pipeline.bandwidth,
        truncation: cfg.pipeline.truncation,
    };
    Ok((rho, g, est))
}

/// Estimates of every replication at one sample size.
type Run = (usize, Vec<Vec<f64>>);

/// Per-replication estimates for each `n`, plus the bound on `n Var` per coordinate.
fn estimates(cfg: &ExperimentConfig) -> Result<(Vec<Run>, Vec<f64>)> {
    let mut out = Vec::new();
    if cfg.model.tag == "ar1" {
        let (rho, g, est) = ar1_setup(cfg)?;
        for &n in &cfg.n_grid {
            let rows = replicate(cfg.seed, &format!("estimate:{}/n={n}", cfg.name), cfg.reps, |rng| {
                let path = simulate_ar1(rho, n, &g, rng)?;
                Ok(vec![adaptive_ar1_estimate(&path, &est, &cfg.pipeline.plan, cfg.pipeline.mesh_c)?.estimate])
            })?;
            out.push((n, rows));
        }
        return Ok((out, vec![1.0 / ts_fisher(rho, &g)?]));
    }
    let model = iid_model(cfg)?;
    let pipeline = EstimatorPipeline::new(model.clone(), cfg.pipeline.clone())?;
    let theta = &cfg.model.theta;
    for &n in &cfg.n_grid {
        let rows = replicate(cfg.seed, &format!("estimate:{}/n={n}", cfg.name), cfg.reps, |rng| {
            let xs = model.sample(theta, n, rng)?;
            pipeline.estimate(&xs)
        })?;
        out.push((n, rows));
    }
    let bound = match model.fisher(theta).and_then(|i| spd_inverse(&i)) {
        Ok(b) => (0..model.dim()).map(|j| b[(j, j)]).collect(),
        Err(_) => vec![f64::NAN; model.dim()],
    };
    Ok((out, bound))
}

/// Runs the pipeline over `reps` replications per sample size and writes
/// `<stem>.estimates.csv` and `<stem>.summary.csv`.
pub fn run_estimate(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let head = header(&cfg.hash()?, cfg.seed);
    let (runs, bound) = estimates(cfg)?;
    let k = cfg.model.theta.len();
    let mut est_rows = Vec::new();
    let mut sum_rows = Vec::new();
    for (n, rows) in &runs {
        for (r, t) in rows.iter().enumerate() {
            let mut row = vec![n.to_string(), r.to_string()];
            row.extend(t.iter().map(|v| v.to_string()));
            est_rows.push(row);
        }
        for j in 0..k {
            let col: Vec<f64> = rows.iter().map(|t| t[j]).collect();
            let var = stats::variance(&col);
            sum_rows.push(vec![
                n.to_string(),
                j.to_string(),
                cfg.model.theta[j].to_string(),
                stats::mean(&col).to_string(),
                var.to_string(),
                (*n as f64 * var).to_string(),
                bound[j].to_string(),
                stats::mean_stderr(&col).to_string(),
            ]);
        }
    }
    let mut cols: Vec<String> = vec!["n".into(), "replication".into()];
    cols.extend((0..k).map(|j| format!("theta_{j}")));
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let est_path = cfg.output_file("estimates", "csv");
    write_table(&est_path, &head, &cols, &est_rows)?;
    let sum_path = cfg.output_file("summary", "csv");
    write_table(
        &sum_path,
        &head,
        &["n", "coordinate", "truth", "mean", "variance", "n_variance", "bound", "mean_stderr"],
        &sum_rows,
    )?;
    Ok(vec![est_path, sum_path])
}

/// The combined report of a `check` run and the files it was written to.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub report: McReport,
    pub files: Vec<PathBuf>,
}

fn tagged(mut r: McReport, n: usize) -> McReport {
    r.experiment_id = format!("{}@n={n}", r.experiment_id);
    r
}

fn diagnostics(cfg: &ExperimentConfig) -> Result<Vec<McReport>> {
    if cfg.diagnostics.is_empty() {
        return Ok(Vec::new());
    }
    if cfg.model.tag == "ar1" {
        return Err(Error::Config("diagnostics run on i.i.d. models; ar1 supports estimate only".into()));
    }
    let model = iid_model(cfg)?;
    let pipeline = if cfg.diagnostics.iter().any(DiagnosticSpec::needs_pipeline) {
        Some(EstimatorPipeline::new(model.clone(), cfg.pipeline.clone())?)
    } else {
        None
    };
    let (theta, reps, seed, s) = (&cfg.model.theta, cfg.reps, cfg.seed, &cfg.slack);
    let mut out = Vec::new();
    for d in &cfg.diagnostics {
        let p = || pipeline.as_ref().expect("pipeline built for this diagnostic");
        match d {
            DiagnosticSpec::Lan { t } => {
                let alt = LocalAlternative::new(theta.clone(), t.clone())?;
                out.push(lan_check(model.as_ref(), &alt, &cfg.n_grid, reps, seed, s)?);
            }
            DiagnosticSpec::Ecdf { distribution, t_grid } => {
                let g = LocationFamily::by_name(distribution).map_err(|e| Error::Config(e.to_string()))?;
                for &n in &cfg.n_grid {
                    out.push(tagged(ecdf_cramer_rao_check(g.density(), t_grid, n, reps, seed, s)?, n));
                }
            }
            DiagnosticSpec::LasSpread { direction } => {
                for &n in &cfg.n_grid {
                    out.push(tagged(las_spread_check(model.as_ref(), p(), theta, direction, n, reps, seed, s)?, n));
                }
            }
            DiagnosticSpec::Regularity { t } => {
                let alt = LocalAlternative::new(theta.clone(), t.clone())?;
                for &n in &cfg.n_grid {
                    out.push(tagged(regularity_check(model.as_ref(), p(), &alt, n, reps, seed, s)?, n));
                }
            }
            DiagnosticSpec::ExcessVariance => {
                for &n in &cfg.n_grid {
                    out.push(tagged(excess_variance(model.as_ref(), p(), theta, n, reps, seed, s)?, n));
                }
            }
        }
    }
    Ok(out)
}

/// Runs the listed diagnostics and writes `<stem>.report.json` and
/// `<stem>.report.csv`, whatever the verdicts.
pub fn run_check(cfg: &ExperimentConfig) -> Result<CheckOutcome> {
    let hash = cfg.hash()?;
    let report = McReport::combine(&cfg.name, cfg.seed, diagnostics(cfg)?);

    let json_path = cfg.output_file("report", "json");
    let doc = ReportFile {
        header: Header {
            toolkit: "semieff",
            version: VERSION,
            config_sha256: &hash,
            seed: cfg.seed,
        },
        report: &report,
    };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
    let mut f = create(&json_path)?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    f.flush()?;

    let csv_path = cfg.output_file("report", "csv");
    let mut f = create(&csv_path)?;
    f.write_all(header(&hash, cfg.seed).as_bytes())?;
    report.write_csv(&mut f)?;
    f.flush()?;
    Ok(CheckOutcome {
        report,
        files: vec![json_path, csv_path],
    })
}
