//! Experiment configuration files (TOML, strict schema).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::CheckSettings;
use crate::error::{Error, Result};
use crate::estimators::PipelineConfig;
use crate::models::ModelParams;

/// Registry tag, parameter value and model settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub tag: String,
    pub theta: Vec<f64>,
    #[serde(default)]
    pub params: ModelParams,
}

/// One entry of the `diagnostics` list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DiagnosticSpec {
    /// LAN remainder along `theta + t / sqrt n` over the whole `n_grid`.
    Lan { t: Vec<f64> },
    /// Spread order of `sqrt(n) a'(T_n - theta)` against the normal bound.
    LasSpread { direction: Vec<f64> },
    /// Law of the estimator error under `theta_n` against `theta`.
    Regularity { t: Vec<f64> },
    ExcessVariance,
    /// ECDF variance at `t_grid` for the named error law.
    Ecdf { distribution: String, t_grid: Vec<f64> },
}

impl DiagnosticSpec {
    pub fn needs_pipeline(&self) -> bool {
        matches!(
            self,
            DiagnosticSpec::LasSpread { .. } | DiagnosticSpec::Regularity { .. } | DiagnosticSpec::ExcessVariance
        )
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Where output files go. Files are named `<stem>.<kind>.<ext>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Defaults to the experiment name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            stem: None,
        }
    }
}

/// A complete, reproducible experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub reps: usize,
    pub n_grid: Vec<usize>,
    pub model: ModelSpec,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default)]
    pub diagnostics: Vec<DiagnosticSpec>,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub slack: CheckSettings,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Hex SHA-256 of the canonical serialization, leaving out the output
    /// paths, which do not affect any number.
    pub fn hash(&self) -> Result<String> {
        let canonical = Self {
            output: OutputPaths::default(),
            ..self.clone()
        };
        Ok(sha256_hex(canonical.to_toml()?.as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Config("name must not be empty".into()));
        }
        if self.reps < 2 {
            return Err(Error::Config("reps must be at least 2".into()));
        }
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(Error::Config("n_grid must list positive sample sizes".into()));
        }
        if self.reps > u32::MAX as usize {
            return Err(Error::Config("too many replications".into()));
        }
        Ok(())
    }

    pub fn stem(&self) -> &str {
        self.output.stem.as_deref().unwrap_or(&self.name)
    }

    pub fn output_file(&self, kind: &str, ext: &str) -> PathBuf {
        self.output.dir.join(format!("{}.{kind}.{ext}", self.stem()))
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
