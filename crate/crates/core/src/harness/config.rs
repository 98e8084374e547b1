use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ModelParams;
use crate::selection::SelectionRule;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleName {
    /// `n = 1, 2, 4, ...` up to `n_steps`, plus `n_steps`.
    Dyadic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckpointSchedule {
    Named(ScheduleName),
    Explicit(Vec<u64>),
}

impl Default for CheckpointSchedule {
    fn default() -> Self {
        CheckpointSchedule::Named(ScheduleName::Dyadic)
    }
}

fn default_d_max() -> usize {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub model: ModelParams,
    pub rule: SelectionRule,
    pub n_steps: u64,
    #[serde(default)]
    pub checkpoints: CheckpointSchedule,
    pub replicas: usize,
    pub master_seed: u64,
    /// Largest degree written to the replica files; higher degrees are
    /// aggregated into an overflow row.
    #[serde(default = "default_d_max")]
    pub d_max: usize,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(model: ModelParams, rule: SelectionRule, n_steps: u64, replicas: usize, master_seed: u64, output_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            model,
            rule,
            n_steps,
            checkpoints: CheckpointSchedule::default(),
            replicas,
            master_seed,
            d_max: default_d_max(),
            output_dir: output_dir.into(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        self.model.validate()?;
        self.rule.validate_for(&self.model)?;
        if self.n_steps < 1 {
            return Err(Error::config("n_steps must be at least 1"));
        }
        if self.replicas < 1 {
            return Err(Error::config("replicas must be at least 1"));
        }
        if let CheckpointSchedule::Explicit(list) = &self.checkpoints {
            if list.is_empty() {
                return Err(Error::config("explicit checkpoint list is empty"));
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config("checkpoints must be strictly increasing"));
            }
            if list[0] < 1 || *list.last().unwrap() > self.n_steps {
                return Err(Error::config("checkpoints must lie in [1, n_steps]"));
            }
        }
        Ok(())
    }

    /// Resolved checkpoint steps; always ends with `n_steps`.
    pub fn checkpoint_steps(&self) -> Vec<u64> {
        let mut steps = match &self.checkpoints {
            CheckpointSchedule::Named(ScheduleName::Dyadic) => {
                let mut v = Vec::new();
                let mut n = 1u64;
                while n < self.n_steps {
                    v.push(n);
                    n = n.saturating_mul(2);
                }
                v
            }
            CheckpointSchedule::Explicit(list) => list.clone(),
        };
        if steps.last() != Some(&self.n_steps) {
            steps.push(self.n_steps);
        }
        steps
    }
}
