//! Pairwise preference matrices and duel sampling.
//!
//! A [`PreferenceMatrix`] holds one round's K×K win probabilities: entry
//! `(i, j)` is the probability that arm `i` beats arm `j` in a direct
//! comparison. Arms are indexed 0-based throughout the API; external text
//! formats and reports use 1-based indices.

use crate::error::CoreError;
use crate::rng::RngStream;
use std::fmt::Write as _;

/// Tolerance for matrix invariant checks. Generation is exact arithmetic on
/// dyadic/BTL values, so this slack only absorbs serialization round-trips.
pub const MATRIX_TOL: f64 = 1e-12;

/// A K×K pairwise preference matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceMatrix {
    k: usize,
    entries: Vec<f64>, // row-major
}

impl PreferenceMatrix {
    /// Build from row-major entries, validating the matrix invariants:
    /// entries in `[0,1]`, complementary off-diagonal pairs, and a `1/2`
    /// diagonal.
    pub fn from_entries(k: usize, entries: Vec<f64>) -> Result<Self, CoreError> {
        if k < 1 {
            return Err(CoreError::InvalidMatrix("arm count must be >= 1".into()));
        }
        if entries.len() != k * k {
            return Err(CoreError::InvalidMatrix(format!(
                "expected {} entries for K={}, got {}",
                k * k,
                k,
                entries.len()
            )));
        }
        let m = PreferenceMatrix { k, entries };
        m.check_invariants()?;
        Ok(m)
    }

    /// Build from rows (convenience for literal 3×3 constructions).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, CoreError> {
        let k = rows.len();
        let mut entries = Vec::with_capacity(k * k);
        for row in rows {
            if row.len() != k {
                return Err(CoreError::InvalidMatrix("ragged rows".into()));
            }
            entries.extend_from_slice(row);
        }
        Self::from_entries(k, entries)
    }

    fn check_invariants(&self) -> Result<(), CoreError> {
        let k = self.k;
        for i in 0..k {
            for j in 0..k {
                let p = self.entries[i * k + j];
                if !(0.0..=1.0).contains(&p) {
                    return Err(CoreError::InvalidMatrix(format!(
                        "entry ({},{}) = {} outside [0,1]",
                        i + 1,
                        j + 1,
                        p
                    )));
                }
                let q = self.entries[j * k + i];
                if (p + q - 1.0).abs() > MATRIX_TOL {
                    return Err(CoreError::InvalidMatrix(format!(
                        "entries ({},{}) and ({},{}) sum to {} != 1",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1,
                        p + q
                    )));
                }
            }
            let d = self.entries[i * k + i];
            if (d - 0.5).abs() > MATRIX_TOL {
                return Err(CoreError::InvalidMatrix(format!(
                    "diagonal entry ({0},{0}) = {1} != 1/2",
                    i + 1,
                    d
                )));
            }
        }
        Ok(())
    }

    /// Arm count K.
    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Win probability of arm `i` over arm `j` (0-based).
    #[inline]
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.k && j < self.k);
        self.entries[i * self.k + j]
    }

    /// Whether two matrices differ in any entry by more than `tol`.
    pub fn differs_from(&self, other: &PreferenceMatrix, tol: f64) -> bool {
        self.k != other.k
            || self
                .entries
                .iter()
                .zip(&other.entries)
                .any(|(a, b)| (a - b).abs() > tol)
    }

    /// Plain-text serialization: first line `K`, then K rows of K
    /// space-separated decimals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.k);
        for i in 0..self.k {
            let row: Vec<String> = (0..self.k).map(|j| format!("{}", self.prob(i, j))).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Parse the plain-text format. The inverse of [`Self::to_text`].
    pub fn from_text(text: &str) -> Result<Self, CoreError> {
        let mut lines = text.lines();
        let k: usize = lines
            .next()
            .ok_or_else(|| CoreError::Parse("empty matrix text".into()))?
            .trim()
            .parse()
            .map_err(|e| CoreError::Parse(format!("bad arm count: {e}")))?;
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            let line = lines
                .next()
                .ok_or_else(|| CoreError::Parse(format!("missing matrix row {}", i + 1)))?;
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|e| CoreError::Parse(format!("bad entry in row {}: {e}", i + 1)))?;
                entries.push(v);
            }
        }
        Self::from_entries(k, entries)
    }
}

/// The observed result of one duel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DuelOutcome {
    /// True when the first arm of the pair was preferred.
    pub first_won: bool,
    /// The compared pair (0-based arm indices).
    pub pair: (usize, usize),
    /// Round the duel was played in (1-based).
    pub round: usize,
}

/// Pairwise gap `δ(i,j) = P(i,j) − 1/2`, antisymmetric in its arguments.
pub fn gap(p: &PreferenceMatrix, i: usize, j: usize) -> Result<f64, CoreError> {
    if i >= p.k() || j >= p.k() {
        return Err(CoreError::ArmOutOfRange {
            arm: i.max(j) + 1,
            k: p.k(),
        });
    }
    Ok(p.prob(i, j) - 0.5)
}

/// Sample one duel between arms `i` and `j`: the first arm wins with
/// probability `P(i,j)`, independently per call given the stream position.
pub fn sample_duel(
    p: &PreferenceMatrix,
    i: usize,
    j: usize,
    round: usize,
    rng: &mut RngStream,
) -> Result<DuelOutcome, CoreError> {
    if i >= p.k() || j >= p.k() {
        return Err(CoreError::ArmOutOfRange {
            arm: i.max(j) + 1,
            k: p.k(),
        });
    }
    Ok(DuelOutcome {
        first_won: rng.bernoulli(p.prob(i, j)),
        pair: (i, j),
        round,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Purpose;

    fn coin_matrix(p12: f64) -> PreferenceMatrix {
        PreferenceMatrix::from_rows(&[vec![0.5, p12], vec![1.0 - p12, 0.5]]).unwrap()
    }

    #[test]
    fn invariants_rejected() {
        // bad diagonal
        assert!(PreferenceMatrix::from_rows(&[vec![0.4, 0.6], vec![0.4, 0.5]]).is_err());
        // non-complementary pair
        assert!(PreferenceMatrix::from_rows(&[vec![0.5, 0.7], vec![0.4, 0.5]]).is_err());
        // out of range
        assert!(PreferenceMatrix::from_rows(&[vec![0.5, 1.2], vec![-0.2, 0.5]]).is_err());
    }

    #[test]
    fn gap_on_diagonal_is_zero() {
        let m = coin_matrix(0.7);
        assert_eq!(gap(&m, 0, 0).unwrap(), 0.0);
        assert_eq!(gap(&m, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn gap_is_antisymmetric() {
        let m = coin_matrix(0.7);
        let g = gap(&m, 0, 1).unwrap();
        assert!((g - 0.2).abs() < 1e-15);
        assert_eq!(gap(&m, 1, 0).unwrap(), -g);
    }

    #[test]
    fn gap_index_error() {
        let m = coin_matrix(0.5);
        assert!(matches!(
            gap(&m, 0, 2),
            Err(CoreError::ArmOutOfRange { .. })
        ));
    }

    #[test]
    fn degenerate_duel_always_first() {
        let m = coin_matrix(1.0);
        let mut rng = RngStream::for_trial(1, 0, Purpose::Duel);
        for t in 1..=100 {
            assert!(sample_duel(&m, 0, 1, t, &mut rng).unwrap().first_won);
        }
    }

    #[test]
    fn fair_duel_frequency() {
        // 1e5 draws of a fair coin: mean within 0.5 ± 0.005 (3σ bound).
        let m = coin_matrix(0.5);
        let mut rng = RngStream::for_trial(2, 0, Purpose::Duel);
        let n = 100_000;
        let wins: u32 = (1..=n)
            .map(|t| sample_duel(&m, 0, 1, t, &mut rng).unwrap().first_won as u32)
            .sum();
        let mean = f64::from(wins) / f64::from(n as u32);
        assert!((mean - 0.5).abs() < 0.005, "mean = {mean}");
    }

    #[test]
    fn duel_empirical_frequency_converges() {
        // n = 1e6 draws: |mean − p| < 3·sqrt(p(1−p)/n).
        let p = 0.3;
        let m = coin_matrix(p);
        let mut rng = RngStream::for_trial(3, 0, Purpose::Duel);
        let n = 1_000_000u32;
        let mut wins = 0u32;
        for t in 1..=n as usize {
            wins += sample_duel(&m, 0, 1, t, &mut rng).unwrap().first_won as u32;
        }
        let mean = f64::from(wins) / f64::from(n);
        let bound = 3.0 * (p * (1.0 - p) / f64::from(n)).sqrt();
        assert!((mean - p).abs() < bound, "mean = {mean}, bound = {bound}");
    }

    #[test]
    fn same_stream_same_outcomes() {
        let m = coin_matrix(0.42);
        let mut a = RngStream::for_round(9, 1, Purpose::Duel, 5);
        let mut b = RngStream::for_round(9, 1, Purpose::Duel, 5);
        let xs: Vec<bool> = (1..=50)
            .map(|t| sample_duel(&m, 0, 1, t, &mut a).unwrap().first_won)
            .collect();
        let ys: Vec<bool> = (1..=50)
            .map(|t| sample_duel(&m, 0, 1, t, &mut b).unwrap().first_won)
            .collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn text_round_trip() {
        let m = PreferenceMatrix::from_rows(&[
            vec![0.5, 0.501, 1.0],
            vec![0.499, 0.5, 0.501],
            vec![0.0, 0.499, 0.5],
        ])
        .unwrap();
        let back = PreferenceMatrix::from_text(&m.to_text()).unwrap();
        assert!(!m.differs_from(&back, 0.0));
    }
}
