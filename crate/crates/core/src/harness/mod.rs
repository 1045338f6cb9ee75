//! Experiment harness: configuration, seeded multi-trial execution,
//! parameter sweeps, and CSV emission.
//!
//! Everything an experiment produces is a pure function of
//! `(config, master_seed)`: traces, policies, and duel noise are derived
//! from per-trial substreams keyed by trial index, so parallel and serial
//! execution yield identical results.

mod config;
mod csv;
mod run;
mod sweep;

pub use config::{EnvSpec, ExperimentConfig, PolicySpec, PolicyName};
pub use csv::{write_bands_csv, write_rounds_csv, write_summary_csv};
pub use run::{run_experiment, run_trial, RunResult, TrialResult};
pub use sweep::{sweep_constant, SweepConfig, SweepResult};

use thiserror::Error;

/// Harness-level errors, split so the CLI can map them to exit codes.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Invalid or inconsistent configuration (exit code 2 territory).
    #[error("config error: {0}")]
    Config(String),

    /// Failure while running (exit code 3 territory).
    #[error("runtime error in trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: crate::CoreError,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
