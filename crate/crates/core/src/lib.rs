//! Simulation library for non-stationary (switching) dueling bandits.
//!
//! The crate provides:
//! - core types: preference matrices, duel outcomes, reproducible RNG
//!   streams ([`matrix`], [`rng`]);
//! - environment families: geometric BTL with permutation changepoints and
//!   the two adversarial mixture constructions, plus preference-class
//!   validation ([`env`]);
//! - a ground-truth oracle for significant winner switches, dynamic regret,
//!   and non-stationarity measures ([`oracle`]);
//! - policies: the candidate-tracking base algorithm and its replay-scheduled
//!   meta wrapper, interleaved filtering, and a uniform-random baseline
//!   ([`policy`]);
//! - an experiment harness with seeded multi-trial execution, parameter
//!   sweeps, and CSV emission ([`harness`]).

pub mod env;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod oracle;
pub mod policy;
pub mod rng;

#[cfg(feature = "testkit")]
pub mod testkit;

pub use error::CoreError;
pub use matrix::{gap, sample_duel, DuelOutcome, PreferenceMatrix};
pub use rng::{Purpose, RngStream};
