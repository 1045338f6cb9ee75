//! Geometric Bradley-Terry-Luce environments.

use super::EnvironmentTrace;
use crate::error::CoreError;
use crate::matrix::PreferenceMatrix;
use crate::rng::RngStream;

/// Geometric BTL preference matrix for a given ranking.
///
/// `ranking[a]` is the rank of arm `a`, 1-based: rank 1 is the best arm.
/// The rank-`i` arm beats the rank-`j` arm with probability
/// `2^{-i} / (2^{-i} + 2^{-j})`, computed here as `1 / (1 + 2^{i-j})`.
pub fn geometric_btl(k: usize, ranking: &[usize]) -> Result<PreferenceMatrix, CoreError> {
    if ranking.len() != k {
        return Err(CoreError::InvalidArgument(format!(
            "ranking length {} != K={k}",
            ranking.len()
        )));
    }
    let mut seen = vec![false; k + 1];
    for &r in ranking {
        if r < 1 || r > k || seen[r] {
            return Err(CoreError::InvalidArgument(
                "ranking must be a permutation of 1..=K".into(),
            ));
        }
        seen[r] = true;
    }
    let mut entries = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            let d = ranking[a] as i32 - ranking[b] as i32;
            entries[a * k + b] = 1.0 / (1.0 + (d as f64).exp2());
        }
    }
    PreferenceMatrix::from_entries(k, entries)
}

/// Identity ranking: arm `a` has rank `a+1`.
pub fn identity_ranking(k: usize) -> Vec<usize> {
    (1..=k).collect()
}

/// Piecewise-constant geometric BTL trace with permutation changepoints.
///
/// The initial ranking is the identity; at each changepoint a fresh uniform
/// permutation of ranks is drawn from `rng`. Changepoints must be strictly
/// increasing rounds in `(1, T]`.
pub fn switching_btl_trace(
    k: usize,
    horizon: usize,
    changepoints: &[usize],
    rng: &mut RngStream,
) -> Result<EnvironmentTrace, CoreError> {
    if k < 1 {
        return Err(CoreError::InvalidArgument("K must be >= 1".into()));
    }
    let mut prev = 1usize;
    for &c in changepoints {
        if c <= prev {
            return Err(CoreError::InvalidArgument(
                "changepoints must be sorted, duplicate-free, and > 1".into(),
            ));
        }
        if c > horizon {
            return Err(CoreError::InvalidArgument(format!(
                "changepoint {c} beyond horizon {horizon}"
            )));
        }
        prev = c;
    }
    let mut segments = Vec::with_capacity(changepoints.len() + 1);
    segments.push((1, geometric_btl(k, &identity_ranking(k))?));
    for &c in changepoints {
        let perm = rng.uniform_permutation(k);
        let ranking: Vec<usize> = perm.iter().map(|&p| p + 1).collect();
        segments.push((c, geometric_btl(k, &ranking)?));
    }
    EnvironmentTrace::piecewise(horizon, segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{condorcet_winner, validate_class};
    use crate::matrix::gap;
    use crate::rng::Purpose;

    #[test]
    fn two_arm_identity_probability() {
        // P(1,2) = (1/2) / (1/2 + 1/4) = 2/3.
        let m = geometric_btl(2, &[1, 2]).unwrap();
        assert!((m.prob(0, 1) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_is_half_for_any_k() {
        for k in 1..=12 {
            let m = geometric_btl(k, &identity_ranking(k)).unwrap();
            for a in 0..k {
                assert_eq!(m.prob(a, a), 0.5);
            }
        }
    }

    #[test]
    fn adjacent_rank_gap_is_one_sixth() {
        let m = geometric_btl(10, &identity_ranking(10)).unwrap();
        assert!((gap(&m, 0, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn non_permutation_rejected() {
        assert!(geometric_btl(3, &[1, 1, 2]).is_err());
        assert!(geometric_btl(3, &[0, 1, 2]).is_err());
        assert!(geometric_btl(3, &[1, 2]).is_err());
    }

    #[test]
    fn btl_satisfies_sst_and_sti() {
        let m = geometric_btl(10, &identity_ranking(10)).unwrap();
        let rep = validate_class(&m);
        assert!(rep.satisfies_sst);
        assert!(rep.satisfies_sti);
        assert_eq!(rep.ordering.as_deref(), Some(&(0..10).collect::<Vec<_>>()[..]));
    }

    #[test]
    fn winner_is_rank_one_arm() {
        let m = geometric_btl(4, &[3, 1, 4, 2]).unwrap();
        assert_eq!(condorcet_winner(&m), Some(1));
    }

    #[test]
    fn no_changepoints_is_stationary() {
        let mut rng = RngStream::for_trial(1, 0, Purpose::Environment);
        let tr = switching_btl_trace(5, 100, &[], &mut rng).unwrap();
        assert_eq!(tr.distinct_matrices().len(), 1);
        assert_eq!(tr.winner_at(1), Some(0));
        assert_eq!(tr.winner_at(100), Some(0));
    }

    #[test]
    fn changepoint_validation() {
        let mut rng = RngStream::for_trial(1, 0, Purpose::Environment);
        assert!(switching_btl_trace(3, 100, &[50, 50], &mut rng).is_err());
        assert!(switching_btl_trace(3, 100, &[60, 50], &mut rng).is_err());
        assert!(switching_btl_trace(3, 100, &[1], &mut rng).is_err());
        assert!(switching_btl_trace(3, 100, &[101], &mut rng).is_err());
    }

    #[test]
    fn fixed_seed_reproduces_permutations() {
        let mk = || {
            let mut rng = RngStream::for_trial(7, 2, Purpose::Environment);
            switching_btl_trace(6, 1000, &[200, 400, 600, 800], &mut rng).unwrap()
        };
        let a = mk();
        let b = mk();
        for t in [1, 250, 450, 650, 850, 1000] {
            assert!(!a.matrix_at(t).differs_from(b.matrix_at(t), 0.0));
        }
    }

    #[test]
    fn winner_changes_bounded_by_changepoints() {
        let mut rng = RngStream::for_trial(3, 0, Purpose::Environment);
        let tr = switching_btl_trace(10, 5000, &[1000, 2000, 3000, 4000], &mut rng).unwrap();
        let mut s = 0;
        for t in 1..5000 {
            if tr.winner_at(t) != tr.winner_at(t + 1) {
                s += 1;
            }
        }
        assert!(s <= 4, "S = {s}");
    }
}
