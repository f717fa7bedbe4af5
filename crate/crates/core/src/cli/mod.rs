//! The `semieff` command-line front end.
//!
//! Subcommands: `bound`, `estimate`, `check` and `list-models`. Exit codes are
//! 0 for success (all verdicts passed), 1 when a diagnostic fails, 2 for
//! configuration or usage errors and 3 for runtime errors.
//!
//! The only environment variable read is `SEMIEFF_THREADS`, the worker count.
//! It never changes numerical output.

mod config;
mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};

pub use config::{DiagnosticSpec, ExperimentConfig, ModelSpec, OutputPaths};
pub use run::{run_check, run_estimate, CheckOutcome};

pub const EXIT_OK: u8 = 0;
pub const EXIT_DIAGNOSTIC_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

/// Seed used by `bound` when none is given (only sampled score laws draw).
pub const DEFAULT_SEED: u64 = 20261018;

#[derive(Debug, Parser)]
#[command(name = "semieff", version, about = "Spread bounds, efficient estimators and Monte Carlo checks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate a spread bound `K^{-1}(u)`.
    Bound(BoundArgs),
    /// Run an estimator pipeline over replications.
    Estimate(RunArgs),
    /// Run the diagnostics listed in a config.
    Check(RunArgs),
    /// List the model registry.
    ListModels {
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFamily {
    Uniform,
    #[value(alias = "van-zwet")]
    Vanzwet,
    #[value(alias = "trigonometric")]
    Trig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreLaw {
    Normal,
    Laplace,
}

#[derive(Debug, Serialize, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["score", "family"])))]
struct BoundArgs {
    /// Law of the score statistic; the bound is computed from its quantile function.
    #[arg(long, value_enum)]
    score: Option<ScoreLaw>,
    /// Moment-based bound family.
    #[arg(long, value_enum)]
    family: Option<BoundFamily>,
    /// Variance of a normal score.
    #[arg(long)]
    var: Option<f64>,
    /// Scale of a Laplace score.
    #[arg(long)]
    scale: Option<f64>,
    /// Second moment `E S^2` (vanzwet, trig).
    #[arg(long)]
    es2: Option<f64>,
    /// First absolute moment `E|S|` (uniform).
    #[arg(long)]
    abs_moment: Option<f64>,
    /// Number of interior levels `u = i / (points + 1)`; bounded families add `u = 0, 1`.
    #[arg(long, default_value_t = 99)]
    points: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the replication count.
    #[arg(long)]
    reps: Option<usize>,
    /// Overrides the sample-size grid (repeatable).
    #[arg(long)]
    n: Vec<usize>,
    /// Overrides the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(r) = self.reps {
            cfg.reps = r;
        }
        if !self.n.is_empty() {
            cfg.n_grid = self.n.clone();
        }
        if let Some(o) = &self.out {
            cfg.output.dir = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Exit code for an error: configuration and domain errors are the caller's
/// to fix (2); everything else is a runtime failure (3).
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("SEMIEFF_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("SEMIEFF_THREADS must be a positive integer, got '{s}'"))),
        },
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = threads_from_env().and_then(|threads| match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Bound(a) => cmd_bound(&a).map(|_| EXIT_OK),
        Command::Estimate(a) => {
            let cfg = a.load()?;
            let files = run_estimate(&cfg)?;
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            Ok(EXIT_OK)
        }
        Command::Check(a) => {
            let cfg = a.load()?;
            let out = run_check(&cfg)?;
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            for v in out.report.verdicts.iter().filter(|v| !v.passed && !v.informational) {
                eprintln!("failed: {} (statistic {}, threshold {})", v.check, v.statistic, v.threshold);
            }
            Ok(if out.report.all_passed() { EXIT_OK } else { EXIT_DIAGNOSTIC_FAILED })
        }
        Command::ListModels { json } => {
            let models = crate::models::list_models();
            let mut stdout = std::io::stdout().lock();
            if json {
                let text = serde_json::to_string_pretty(&models).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(stdout, "{text}")?;
            } else {
                writeln!(stdout, "{:<20} {:>3}  {:<8} description", "name", "dim", "regular")?;
                for m in models {
                    writeln!(stdout, "{:<20} {:>3}  {:<8} {}", m.name, m.dim, m.regular, m.description)?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn require(v: Option<f64>, flag: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("--{flag} is required for this bound")))
}

fn cmd_bound(a: &BoundArgs) -> Result<()> {
    use crate::spread::{self, ScoreStatistic};
    if a.points == 0 {
        return Err(Error::Config("--points must be positive".into()));
    }
    let bound = match (a.score, a.family) {
        (Some(ScoreLaw::Normal), _) => {
            let s = ScoreStatistic::normal(require(a.var, "var")?);
            spread::spread_bound_from_score(&s, 1e-10, &mut crate::RngStream::new(a.seed, 0))
        }
        (Some(ScoreLaw::Laplace), _) => {
            let s = ScoreStatistic::laplace(require(a.scale, "scale")?);
            spread::spread_bound_from_score(&s, 1e-10, &mut crate::RngStream::new(a.seed, 0))
        }
        (None, Some(BoundFamily::Uniform)) => spread::uniform_bound(require(a.abs_moment, "abs-moment")?),
        (None, Some(BoundFamily::Vanzwet)) => spread::van_zwet_bound(require(a.es2, "es2")?),
        (None, Some(BoundFamily::Trig)) => spread::trigonometric_bound(require(a.es2, "es2")?),
        (None, None) => return Err(Error::Config("one of --score or --family is required".into())),
    }
    .map_err(|e| match e {
        Error::Domain(m) => Error::Config(m),
        other => other,
    })?;
    // Bounded families also get the endpoints u = 0 and u = 1.
    let range = if bound.k_inverse().support_hint().is_some() { 0..=a.points + 1 } else { 1..=a.points };
    let grid: Vec<f64> = range.map(|i| i as f64 / (a.points + 1) as f64).collect();
    let canonical = serde_json::to_string(a).map_err(|e| Error::Io(e.to_string()))?;
    let header = run::header(&config::sha256_hex(canonical.as_bytes()), a.seed);
    match &a.out {
        Some(path) => {
            let mut f = run::create(path)?;
            f.write_all(header.as_bytes())?;
            bound.write_csv(&grid, &mut f)?;
            f.flush()?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(header.as_bytes())?;
            bound.write_csv(&grid, &mut out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
