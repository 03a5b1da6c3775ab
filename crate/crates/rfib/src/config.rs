use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::verify::CheckSpec;
use crate::UsageError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Text,
}

/// Settings shared by every command. Loaded from a JSON file, then
/// overridden field by field by command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m: Option<u32>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub t: Option<usize>,
    pub tol: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub p: Option<Vec<f64>>,
    #[serde(default)]
    pub timing: bool,
    /// Check list for `verify`; the standard suite when absent.
    pub checks: Option<Vec<CheckSpec>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("config {}: {e}", path.display())).into())
    }

    /// Fields set in `flags` win over the ones in `self`.
    pub fn overridden_by(self, flags: RunConfig) -> RunConfig {
        RunConfig {
            m: flags.m.or(self.m),
            n: flags.n.or(self.n),
            k: flags.k.or(self.k),
            t: flags.t.or(self.t),
            tol: flags.tol.or(self.tol),
            trials: flags.trials.or(self.trials),
            seed: flags.seed.or(self.seed),
            budget: flags.budget.or(self.budget),
            format: flags.format.or(self.format),
            out: flags.out.or(self.out),
            p: flags.p.or(self.p),
            timing: flags.timing || self.timing,
            checks: flags.checks.or(self.checks),
        }
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        if self.m == Some(0) {
            return Err(UsageError("--m must be at least 1".into()));
        }
        if self.budget == Some(0) {
            return Err(UsageError("--budget must be at least 1".into()));
        }
        if self.trials == Some(0) {
            return Err(UsageError("--trials must be at least 1".into()));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(UsageError(format!("--tol must be a positive number, got {tol}")));
            }
        }
        Ok(())
    }
}
