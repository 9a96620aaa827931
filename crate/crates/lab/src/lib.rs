//! Experiment runner for the RIS sum-rate agents: configuration, CSV run
//! records, aggregation, SVG plots and checkpoint formats.

pub mod checkpoint;
pub mod config;
pub mod experiment;
pub mod plot;
pub mod records;
pub mod stats;

pub use config::{BetaLoMode, ExperimentConfig, RunScenario};
pub use experiment::{aggregate, run_experiment, run_seed, RunOptions, RunRecord, SuiteSummary};
