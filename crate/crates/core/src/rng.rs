//! Reproducible randomness.
//!
//! Every random draw in the library comes from an [`RngStream`] derived from a
//! 64-bit master seed and a substream key. The environment's randomness, the
//! policy's randomness, and the replay schedule all live on separate
//! substreams, so each can be replayed independently of the others. Two
//! processes that derive a stream from the same `(seed, key)` observe the
//! same draw sequence, bit for bit, on every platform.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Substream purpose tags. Keeping these distinct guarantees that e.g. the
/// duel noise and the replay schedule never share a stream even for the same
/// trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    /// Environment construction (changepoint permutations, mixture coins).
    Environment,
    /// Duel outcome noise.
    Duel,
    /// Policy-internal draws (candidate init, arm sampling).
    Policy,
    /// Replay schedule Bernoulli draws.
    Schedule,
    /// Validation-environment generation for parameter sweeps.
    Sweep,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Environment => 0x01,
            Purpose::Duel => 0x02,
            Purpose::Policy => 0x03,
            Purpose::Schedule => 0x04,
            Purpose::Sweep => 0x05,
        }
    }
}

/// SplitMix64 finalizer. Fixed here (rather than borrowed from a hasher
/// crate) so the key derivation can never drift between library versions.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fold a sequence of key parts into a single 64-bit stream key.
#[inline]
pub(crate) fn derive_key(master_seed: u64, parts: &[u64]) -> u64 {
    let mut acc = mix64(master_seed);
    for &p in parts {
        acc = mix64(acc ^ p);
    }
    acc
}

/// A deterministic random stream.
///
/// Draw primitives are implemented directly on top of the ChaCha word stream
/// so that the sequence is frozen by this crate, independent of `rand`'s
/// distribution internals.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    /// Stream for a bare master seed (used at the top of a derivation tree).
    pub fn from_master(master_seed: u64) -> Self {
        RngStream {
            rng: ChaCha8Rng::seed_from_u64(derive_key(master_seed, &[])),
        }
    }

    /// Stream keyed by `(trial, purpose)`.
    pub fn for_trial(master_seed: u64, trial: u64, purpose: Purpose) -> Self {
        RngStream {
            rng: ChaCha8Rng::seed_from_u64(derive_key(master_seed, &[trial, purpose.tag()])),
        }
    }

    /// Stream keyed by `(trial, purpose, round)`, for draws that must be
    /// addressable per round.
    pub fn for_round(master_seed: u64, trial: u64, purpose: Purpose, round: u64) -> Self {
        RngStream {
            rng: ChaCha8Rng::seed_from_u64(derive_key(
                master_seed,
                &[trial, purpose.tag(), round],
            )),
        }
    }

    /// Derive a child stream from this stream's own output plus extra parts.
    pub fn substream(&mut self, parts: &[u64]) -> Self {
        let base = self.next_u64();
        RngStream {
            rng: ChaCha8Rng::seed_from_u64(derive_key(base, parts)),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli draw.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform index in `[0, n)` by rejection sampling (unbiased).
    pub fn uniform_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "uniform_index over empty range");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    /// Uniform random permutation of `0..k` (Fisher-Yates).
    pub fn uniform_permutation(&mut self, k: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            let j = self.uniform_index(i + 1);
            perm.swap(i, j);
        }
        perm
    }
}

/// One-off Bernoulli coin addressed by a key, without allocating a stream.
/// Used for the lazily drawn replay schedule: the value of a coin is a pure
/// function of `(seed, parts)`, so consulting it twice gives the same answer.
pub fn keyed_coin(master_seed: u64, parts: &[u64], p: f64) -> bool {
    let u = (derive_key(master_seed, parts) >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    u < p
}
