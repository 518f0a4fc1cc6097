//! Experiment configuration: a JSON file naming the system, the
//! experiment parameters, the seed, and the budget.

use std::fmt;

use serde::{Deserialize, Serialize};

use ergolab_core::interval::ClassifyConfig;
use ergolab_core::props::PropertyGrid;
use ergolab_core::{zoo, Point, SystemSpec};

/// A system given either by zoo name (e.g. `"golden_mean_sft"`,
/// `"rotation(0.5)"`) or as an inline spec object.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemRef {
    Zoo(String),
    Spec(SystemSpec),
}

impl SystemRef {
    pub fn resolve(&self) -> Result<SystemSpec, ConfigError> {
        match self {
            SystemRef::Zoo(name) => zoo::zoo(name).map_err(|e| ConfigError {
                field: "system".into(),
                message: e.to_string(),
            }),
            SystemRef::Spec(spec) => Ok(spec.clone()),
        }
    }
}

/// Parameters of a tracing experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceParams {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_quarter")]
    pub delta1: f64,
    #[serde(default)]
    pub delta2: f64,
    #[serde(default = "default_half")]
    pub eps: f64,
    #[serde(default = "default_blocks")]
    pub blocks: usize,
    /// Explicit target points; landmarks alternate when absent.
    #[serde(default)]
    pub targets: Option<Vec<Point>>,
    /// Path to a certificate JSON to re-check instead of searching.
    #[serde(default)]
    pub verify: Option<String>,
}

fn default_n() -> usize {
    16
}
fn default_quarter() -> f64 {
    0.25
}
fn default_half() -> f64 {
    0.5
}
fn default_blocks() -> usize {
    4
}

/// Parameters of the dichotomy experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DichotomyParams {
    /// Scales for the entropy estimate.
    pub entropy_eps: Vec<f64>,
    /// Segment lengths for the entropy estimate.
    pub entropy_ns: Vec<usize>,
    /// Grid for the tracing-hypothesis check.
    pub grid: PropertyGrid,
    /// Lengths for the unique-ergodicity spread rows.
    pub measure_ns: Vec<usize>,
    /// Clustering threshold (half the linkage distance).
    pub eta: f64,
    /// Entropy slope at or below this counts as "zero at scale".
    #[serde(default = "default_slope_threshold")]
    pub slope_threshold: f64,
}

fn default_slope_threshold() -> f64 {
    0.05
}

/// The experiment to run; the JSON `kind` must match the CLI subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Entropy {
        eps: Vec<f64>,
        ns: Vec<usize>,
    },
    Trace(TraceParams),
    App {
        grid: PropertyGrid,
    },
    Sapp {
        grid: PropertyGrid,
    },
    Spec {
        profiles: Vec<Vec<usize>>,
        eps: Vec<f64>,
    },
    UniqueErgodicity {
        ns: Vec<usize>,
    },
    Cluster {
        n: usize,
        eta: f64,
    },
    IntervalClassify {
        #[serde(default)]
        classify: ClassifyConfig,
    },
    Dichotomy(DichotomyParams),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Entropy { .. } => "entropy",
            Experiment::Trace(_) => "trace",
            Experiment::App { .. } => "app",
            Experiment::Sapp { .. } => "sapp",
            Experiment::Spec { .. } => "spec",
            Experiment::UniqueErgodicity { .. } => "unique-ergodicity",
            Experiment::Cluster { .. } => "cluster",
            Experiment::IntervalClassify { .. } => "interval-classify",
            Experiment::Dichotomy(_) => "dichotomy",
        }
    }
}

/// Top-level experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub system: SystemRef,
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

fn default_budget() -> usize {
    4096
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.budget == 0 {
            return Err(ConfigError {
                field: "budget".into(),
                message: "budget must be positive".into(),
            });
        }
        self.system.resolve()?;
        Ok(())
    }
}

/// A configuration error naming the offending field.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Parse and validate a config from raw JSON bytes.
pub fn parse_config(bytes: &[u8]) -> Result<ExperimentConfig, ConfigError> {
    let config: ExperimentConfig = serde_json::from_slice(bytes).map_err(|e| ConfigError {
        field: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}
