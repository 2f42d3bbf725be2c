//! Std side of `irabs-core`: game and graph files, CSV traces, experiment configs, the
//! batch runner and trace aggregation. The `irabs` binary wraps these.

pub mod aggregate;
pub mod config;
pub mod format;
pub mod harness;
pub mod trace;

pub use config::{Algorithm, BatchConfig, ExperimentConfig};
pub use harness::{run_experiment, ExperimentResult, WallClock};
