//! Environment families and trace plumbing.
//!
//! An [`EnvironmentTrace`] is a horizon-length sequence of preference
//! matrices together with the per-round Condorcet winner. Traces are
//! immutable once constructed: all random draws (changepoint permutations,
//! per-round mixture coins) are materialized from their own substream at
//! construction time, so the oracle and the policy see the identical
//! realized sequence and independent trace instances can run in parallel.

mod adversary;
mod btl;
mod class;
mod io;

pub use adversary::{condorcet_lower_bound_trace, sst_violating_trace, thm1_matrices};
pub use btl::{geometric_btl, switching_btl_trace};
pub use class::{condorcet_winner, validate_class, ClassReport};
pub use io::{read_trace, write_trace};

use crate::error::CoreError;
use crate::matrix::{PreferenceMatrix, MATRIX_TOL};

#[derive(Debug, Clone)]
enum Provider {
    /// One matrix per round.
    Explicit(Vec<PreferenceMatrix>),
    /// Piecewise-constant: `(start_round, matrix)` segments, first start = 1.
    Segments(Vec<(usize, PreferenceMatrix)>),
    /// Per-round uniform mixture of two matrices; `coins[t-1]` picks `plus`.
    Mixture {
        plus: Box<PreferenceMatrix>,
        minus: Box<PreferenceMatrix>,
        coins: Vec<bool>,
    },
}

#[derive(Debug, Clone)]
enum WinnerCache {
    PerRound(Vec<Option<usize>>),
    PerSegment(Vec<Option<usize>>),
    Pair {
        plus: Option<usize>,
        minus: Option<usize>,
    },
}

/// A fixed sequence of preference matrices over rounds `1..=T`.
#[derive(Debug, Clone)]
pub struct EnvironmentTrace {
    horizon: usize,
    k: usize,
    provider: Provider,
    winners: WinnerCache,
}

impl EnvironmentTrace {
    /// Trace listing every round's matrix explicitly.
    pub fn explicit(matrices: Vec<PreferenceMatrix>) -> Result<Self, CoreError> {
        if matrices.is_empty() {
            return Err(CoreError::InvalidArgument("empty trace".into()));
        }
        let k = matrices[0].k();
        if matrices.iter().any(|m| m.k() != k) {
            return Err(CoreError::InvalidArgument(
                "all matrices in a trace must share K".into(),
            ));
        }
        let winners = WinnerCache::PerRound(
            matrices.iter().map(condorcet_winner).collect(),
        );
        Ok(EnvironmentTrace {
            horizon: matrices.len(),
            k,
            provider: Provider::Explicit(matrices),
            winners,
        })
    }

    /// Piecewise-constant trace from `(start_round, matrix)` segments.
    /// Starts must begin at 1 and be strictly increasing, all within `[1, horizon]`.
    pub fn piecewise(
        horizon: usize,
        segments: Vec<(usize, PreferenceMatrix)>,
    ) -> Result<Self, CoreError> {
        if horizon == 0 {
            return Err(CoreError::InvalidArgument("horizon must be >= 1".into()));
        }
        if segments.is_empty() {
            return Err(CoreError::InvalidArgument("no segments".into()));
        }
        if segments[0].0 != 1 {
            return Err(CoreError::InvalidArgument(
                "first segment must start at round 1".into(),
            ));
        }
        let k = segments[0].1.k();
        let mut prev = 0usize;
        for (start, m) in &segments {
            if *start <= prev {
                return Err(CoreError::InvalidArgument(
                    "segment starts must be strictly increasing".into(),
                ));
            }
            if *start > horizon {
                return Err(CoreError::InvalidArgument(format!(
                    "segment start {start} beyond horizon {horizon}"
                )));
            }
            if m.k() != k {
                return Err(CoreError::InvalidArgument(
                    "all matrices in a trace must share K".into(),
                ));
            }
            prev = *start;
        }
        let winners =
            WinnerCache::PerSegment(segments.iter().map(|(_, m)| condorcet_winner(m)).collect());
        Ok(EnvironmentTrace {
            horizon,
            k,
            provider: Provider::Segments(segments),
            winners,
        })
    }

    /// Per-round uniform mixture of two matrices with materialized coins.
    pub(crate) fn mixture(
        plus: PreferenceMatrix,
        minus: PreferenceMatrix,
        coins: Vec<bool>,
    ) -> Result<Self, CoreError> {
        if coins.is_empty() {
            return Err(CoreError::InvalidArgument("empty trace".into()));
        }
        if plus.k() != minus.k() {
            return Err(CoreError::InvalidArgument(
                "mixture matrices must share K".into(),
            ));
        }
        let winners = WinnerCache::Pair {
            plus: condorcet_winner(&plus),
            minus: condorcet_winner(&minus),
        };
        Ok(EnvironmentTrace {
            horizon: coins.len(),
            k: plus.k(),
            provider: Provider::Mixture {
                plus: Box::new(plus),
                minus: Box::new(minus),
                coins,
            },
            winners,
        })
    }

    /// Horizon T.
    #[inline]
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Arm count K.
    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    fn segment_index(segments: &[(usize, PreferenceMatrix)], t: usize) -> usize {
        // Largest start <= t.
        match segments.binary_search_by(|(s, _)| s.cmp(&t)) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    /// The preference matrix in force at round `t` (1-based).
    pub fn matrix_at(&self, t: usize) -> &PreferenceMatrix {
        assert!(
            t >= 1 && t <= self.horizon,
            "round {t} outside [1, {}]",
            self.horizon
        );
        match &self.provider {
            Provider::Explicit(ms) => &ms[t - 1],
            Provider::Segments(segs) => &segs[Self::segment_index(segs, t)].1,
            Provider::Mixture { plus, minus, coins } => {
                if coins[t - 1] {
                    plus
                } else {
                    minus
                }
            }
        }
    }

    /// The Condorcet winner at round `t`, if one exists (lowest index on ties).
    pub fn winner_at(&self, t: usize) -> Option<usize> {
        assert!(t >= 1 && t <= self.horizon);
        match (&self.winners, &self.provider) {
            (WinnerCache::PerRound(ws), _) => ws[t - 1],
            (WinnerCache::PerSegment(ws), Provider::Segments(segs)) => {
                ws[Self::segment_index(segs, t)]
            }
            (WinnerCache::Pair { plus, minus }, Provider::Mixture { coins, .. }) => {
                if coins[t - 1] {
                    *plus
                } else {
                    *minus
                }
            }
            _ => unreachable!("winner cache matches provider"),
        }
    }

    /// Gap of arm `a` to the round's Condorcet winner, `δ_t(a*_t, a)`.
    pub fn winner_gap(&self, t: usize, a: usize) -> Result<f64, CoreError> {
        let w = self
            .winner_at(t)
            .ok_or(CoreError::NoCondorcetWinner { round: t })?;
        Ok(self.matrix_at(t).prob(w, a) - 0.5)
    }

    /// Whether every round has a Condorcet winner.
    pub fn condorcet_everywhere(&self) -> bool {
        match &self.winners {
            WinnerCache::PerRound(ws) => ws.iter().all(|w| w.is_some()),
            WinnerCache::PerSegment(ws) => ws.iter().all(|w| w.is_some()),
            WinnerCache::Pair { plus, minus } => plus.is_some() && minus.is_some(),
        }
    }

    /// Distinct matrices realized by the trace, in first-appearance order.
    pub fn distinct_matrices(&self) -> Vec<&PreferenceMatrix> {
        match &self.provider {
            Provider::Explicit(ms) => {
                let mut uniq: Vec<&PreferenceMatrix> = Vec::new();
                for m in ms {
                    if !uniq.iter().any(|u| !u.differs_from(m, MATRIX_TOL)) {
                        uniq.push(m);
                    }
                }
                uniq
            }
            Provider::Segments(segs) => segs.iter().map(|(_, m)| m).collect(),
            Provider::Mixture { plus, minus, .. } => vec![plus, minus],
        }
    }

    /// Number of piecewise segments (1 for explicit/mixture providers).
    pub fn segment_starts(&self) -> Option<Vec<usize>> {
        match &self.provider {
            Provider::Segments(segs) => Some(segs.iter().map(|(s, _)| *s).collect()),
            _ => None,
        }
    }
}
