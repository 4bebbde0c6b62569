//! Command-line harness: experiment configs, seeded runs, JSON reports and CSV
//! plot data. The binary `indepmaps` is a thin wrapper around [`commands::run`].

pub mod cli;
pub mod commands;
pub mod config;
pub mod experiment;
pub mod io;
pub mod plot;
pub mod report;

pub use config::{ExperimentConfig, Mode};
pub use experiment::run_experiment;
pub use report::{Check, Report};

/// Environment variable supplying the seed when neither `--seed` nor the config sets one.
pub const SEED_ENV: &str = "INDEPMAPS_SEED";

/// Seed used when nothing else provides one.
pub const DEFAULT_SEED: u64 = 20_240_601;
