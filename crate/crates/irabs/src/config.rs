//! Experiment and batch configuration.

use std::fmt;
use std::path::PathBuf;

use irabs_core::domains::Domain;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Algorithm {
    Fp,
    Fpira,
    CfrPlus,
    CfrIra,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Fp => "fp",
            Algorithm::Fpira => "fpira",
            Algorithm::CfrPlus => "cfr_plus",
            Algorithm::CfrIra => "cfr_ira",
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error(transparent)]
    Domain(#[from] irabs_core::domains::UnknownDomain),
    #[error("{0} only applies to cfr_ira")]
    NotForAlgorithm(&'static str),
    #[error("cfr_ira needs k_b and k_h")]
    MissingSampleSizes,
    #[error("epsilon must be positive, got {0}")]
    Epsilon(f64),
    #[error("a graph file only applies to graph pursuit")]
    GraphWithoutPursuit,
}

fn default_delay() -> u64 {
    100
}
fn default_check() -> u64 {
    10
}
fn default_epsilon() -> f64 {
    0.05
}
fn default_max() -> u64 {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Domain name such as `P222`, `GS5`, `GP4`, or a path to a game JSON file.
    pub domain: String,
    pub algorithm: Algorithm,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_b: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_h: Option<usize>,
    #[serde(default = "default_delay")]
    pub delay: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max")]
    pub max_iterations: u64,
    #[serde(default = "default_check")]
    pub check_interval: u64,
    /// Graph file replacing the default pursuit graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(domain: &str, algorithm: Algorithm) -> Self {
        ExperimentConfig {
            domain: domain.to_string(),
            algorithm,
            epsilon: default_epsilon(),
            k_b: None,
            k_h: None,
            delay: default_delay(),
            seed: 0,
            max_iterations: default_max(),
            check_interval: default_check(),
            graph: None,
            output: None,
        }
    }

    pub fn is_game_file(&self) -> bool {
        self.domain.ends_with(".json")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.epsilon > 0.0) {
            return Err(ConfigError::Epsilon(self.epsilon));
        }
        if !self.is_game_file() {
            let d: Domain = self.domain.parse()?;
            if self.graph.is_some() && !matches!(d, Domain::Pursuit(_)) {
                return Err(ConfigError::GraphWithoutPursuit);
            }
        } else if self.graph.is_some() {
            return Err(ConfigError::GraphWithoutPursuit);
        }
        if self.algorithm == Algorithm::CfrIra {
            if self.k_b.is_none() || self.k_h.is_none() {
                return Err(ConfigError::MissingSampleSizes);
            }
        } else {
            if self.k_b.is_some() {
                return Err(ConfigError::NotForAlgorithm("k_b"));
            }
            if self.k_h.is_some() {
                return Err(ConfigError::NotForAlgorithm("k_h"));
            }
        }
        Ok(())
    }

    /// Same experiment up to the seed and output path.
    pub fn same_setup(&self, other: &Self) -> bool {
        let strip = |c: &Self| ExperimentConfig { seed: 0, output: None, ..c.clone() };
        strip(self) == strip(other)
    }

    /// File stem such as `GS5_cfr_ira_B10H90_s3`.
    pub fn run_name(&self) -> String {
        let base = std::path::Path::new(&self.domain)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.domain.clone());
        match (self.k_b, self.k_h) {
            (Some(b), Some(h)) => format!("{base}_{}_B{b}H{h}_s{}", self.algorithm, self.seed),
            _ => format!("{base}_{}_s{}", self.algorithm, self.seed),
        }
    }
}

/// A list of experiments, each optionally repeated over several seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    /// Directory receiving one CSV per run and `index.json`.
    pub output_dir: PathBuf,
    pub experiments: Vec<BatchEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchEntry {
    #[serde(flatten)]
    pub config: ExperimentConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
}

impl BatchConfig {
    /// One config per run, outputs placed in the batch directory.
    pub fn expand(&self) -> Result<Vec<ExperimentConfig>, ConfigError> {
        let mut out = Vec::new();
        for e in &self.experiments {
            let seeds = e.seeds.clone().unwrap_or_else(|| vec![e.config.seed]);
            for s in seeds {
                let mut c = ExperimentConfig { seed: s, ..e.config.clone() };
                c.validate()?;
                c.output = Some(self.output_dir.join(format!("{}.csv", c.run_name())));
                out.push(c);
            }
        }
        Ok(out)
    }
}
