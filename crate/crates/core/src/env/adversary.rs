//! Adversarial lower-bound environments.
//!
//! Both constructions mix two K=3 matrices uniformly at random every round.
//! The two matrices have different winners but share a single safe arm, and
//! every pairwise observation is marginally Ber(1/2) over the adversary's
//! coin, so no algorithm can tell the safe arm apart from an unsafe one.

use super::EnvironmentTrace;
use crate::error::CoreError;
use crate::matrix::PreferenceMatrix;
use crate::rng::RngStream;

fn check_epsilon(epsilon: f64) -> Result<(), CoreError> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(CoreError::InvalidArgument(format!(
            "epsilon must be in (0, 1/2), got {epsilon}"
        )));
    }
    Ok(())
}

/// The two matrices of the Condorcet-class construction: in `plus` arm 1 is
/// the winner (1 ≻ 2 ≻ 3), in `minus` arm 3 is (3 ≻ 2 ≻ 1). Arm 2 keeps a
/// gap of exactly `epsilon` to the winner in both.
pub fn thm1_matrices(
    epsilon: f64,
) -> Result<(PreferenceMatrix, PreferenceMatrix), CoreError> {
    check_epsilon(epsilon)?;
    let e = epsilon;
    let plus = PreferenceMatrix::from_rows(&[
        vec![0.5, 0.5 + e, 1.0],
        vec![0.5 - e, 0.5, 0.5 + e],
        vec![0.0, 0.5 - e, 0.5],
    ])?;
    let minus = PreferenceMatrix::from_rows(&[
        vec![0.5, 0.5 - e, 0.0],
        vec![0.5 + e, 0.5, 0.5 - e],
        vec![1.0, 0.5 + e, 0.5],
    ])?;
    Ok((plus, minus))
}

/// K=3 trace where each round is independently `plus` or `minus` from
/// [`thm1_matrices`], probability 1/2 each. The realized matrices satisfy
/// SST but violate STI. For `epsilon < 1/sqrt(T)` the trace has no
/// significant winner switch despite changing the matrix on the order of
/// every other round.
pub fn condorcet_lower_bound_trace(
    horizon: usize,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<EnvironmentTrace, CoreError> {
    let (plus, minus) = thm1_matrices(epsilon)?;
    let coins: Vec<bool> = (0..horizon).map(|_| rng.bernoulli(0.5)).collect();
    EnvironmentTrace::mixture(plus, minus, coins)
}

/// The matrices of the companion construction: `plus` has 3 ≻ 2 ≻ 1 and
/// `minus` (arms 2 and 3 switched) has 2 ≻ 3 ≻ 1. Arm 1 always has a gap
/// of exactly `epsilon` to the winner, while arms 2 and 3 alternate between
/// best and worst with a gap of 1/2.
pub fn remark_b1_matrices(
    epsilon: f64,
) -> Result<(PreferenceMatrix, PreferenceMatrix), CoreError> {
    check_epsilon(epsilon)?;
    let e = epsilon;
    let plus = PreferenceMatrix::from_rows(&[
        vec![0.5, 0.5 - e, 0.5 - e],
        vec![0.5 + e, 0.5, 0.0],
        vec![0.5 + e, 1.0, 0.5],
    ])?;
    // Same matrix with arms 2 and 3 switched.
    let minus = PreferenceMatrix::from_rows(&[
        vec![0.5, 0.5 - e, 0.5 - e],
        vec![0.5 + e, 0.5, 1.0],
        vec![0.5 + e, 0.0, 0.5],
    ])?;
    Ok((plus, minus))
}

/// K=3 mixture trace over [`remark_b1_matrices`]. The realized matrices
/// satisfy STI but violate SST.
pub fn sst_violating_trace(
    horizon: usize,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<EnvironmentTrace, CoreError> {
    let (plus, minus) = remark_b1_matrices(epsilon)?;
    let coins: Vec<bool> = (0..horizon).map(|_| rng.bernoulli(0.5)).collect();
    EnvironmentTrace::mixture(plus, minus, coins)
}
