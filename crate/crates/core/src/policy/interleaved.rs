//! Interleaved Filtering for stationary dueling bandits.
//!
//! Maintains a candidate arm and a working set of unresolved arms. The
//! candidate duels the working set in round-robin order, tracking its
//! empirical win rate against each. Internals follow the classical IF
//! recipe and are the deviation surface for this baseline:
//!   - confidence radius `sqrt(ln(T * K^2 / delta') / n)` on `n`
//!     comparisons, with the default confidence making this `ln(T*K^2)/n`
//!     under the square root;
//!   - an arm is pruned once the candidate's empirical win rate minus the
//!     radius exceeds 1/2;
//!   - the candidate is replaced by any arm that beats it at confidence
//!     (most confident wins, then lowest index), resetting all counters.
//! After the working set empties the candidate plays itself for the rest of
//! the horizon.

use super::Policy;
use crate::matrix::DuelOutcome;
use crate::rng::RngStream;

pub struct InterleavedFiltering {
    k: usize,
    log_conf: f64, // ln(T * K^2 / delta-scale)
    candidate: usize,
    working: Vec<usize>,
    cursor: usize,
    wins: Vec<f64>,
    plays: Vec<f64>,
    pending: Option<usize>,
}

impl InterleavedFiltering {
    /// `delta` rescales the default confidence `1/(T K^2)`; `None` uses the
    /// default exactly.
    pub fn new(horizon: usize, k: usize, delta: Option<f64>, rng: &mut RngStream) -> Self {
        assert!(k >= 1 && horizon >= 1);
        let scale = delta.unwrap_or(1.0);
        let log_conf = ((horizon as f64) * (k as f64) * (k as f64) / scale)
            .ln()
            .max(1.0);
        let candidate = rng.uniform_index(k);
        let working: Vec<usize> = (0..k).filter(|&a| a != candidate).collect();
        InterleavedFiltering {
            k,
            log_conf,
            candidate,
            working,
            cursor: 0,
            wins: vec![0.0; k],
            plays: vec![0.0; k],
            pending: None,
        }
    }

    fn radius(&self, n: f64) -> f64 {
        (self.log_conf / n).sqrt()
    }

    fn reset_counters(&mut self) {
        self.wins.iter_mut().for_each(|w| *w = 0.0);
        self.plays.iter_mut().for_each(|p| *p = 0.0);
        self.cursor = 0;
    }

    fn filter(&mut self) {
        // Prune arms the candidate beats at confidence.
        let (wins, plays, log_conf) = (&self.wins, &self.plays, self.log_conf);
        self.working.retain(|&a| {
            if plays[a] == 0.0 {
                return true;
            }
            let mean = wins[a] / plays[a];
            mean - (log_conf / plays[a]).sqrt() <= 0.5
        });
        // Candidate replacement: the arm that beats it most confidently.
        let mut challenger: Option<(f64, usize)> = None;
        for &a in &self.working {
            if self.plays[a] == 0.0 {
                continue;
            }
            let mean = self.wins[a] / self.plays[a];
            let upper = mean + self.radius(self.plays[a]);
            if upper < 0.5 && challenger.map_or(true, |(b, _)| upper < b) {
                challenger = Some((upper, a));
            }
        }
        if let Some((_, a)) = challenger {
            self.candidate = a;
            self.working.retain(|&b| b != a);
            self.reset_counters();
        }
    }
}

impl Policy for InterleavedFiltering {
    fn select_pair(&mut self, _round: usize) -> (usize, usize) {
        if self.working.is_empty() {
            return (self.candidate, self.candidate);
        }
        if self.cursor >= self.working.len() {
            self.cursor = 0;
        }
        let opponent = self.working[self.cursor];
        self.cursor += 1;
        self.pending = Some(opponent);
        (self.candidate, opponent)
    }

    fn observe(&mut self, outcome: &DuelOutcome) {
        let Some(opponent) = self.pending.take() else {
            return;
        };
        self.plays[opponent] += 1.0;
        if outcome.first_won {
            self.wins[opponent] += 1.0;
        }
        self.filter();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{geometric_btl, identity_ranking};
    use crate::matrix::sample_duel;
    use crate::rng::Purpose;

    #[test]
    fn single_arm_always_self_play() {
        let mut rng = RngStream::for_trial(1, 0, Purpose::Policy);
        let mut p = InterleavedFiltering::new(100, 1, None, &mut rng);
        for t in 1..=5 {
            assert_eq!(p.select_pair(t), (0, 0));
        }
    }

    #[test]
    fn converges_to_best_arm_on_stationary_btl() {
        let horizon = 30_000;
        let k = 10;
        let m = geometric_btl(k, &identity_ranking(k)).unwrap();
        let mut pol_rng = RngStream::for_trial(3, 0, Purpose::Policy);
        let mut duel_rng = RngStream::for_trial(3, 0, Purpose::Duel);
        let mut p = InterleavedFiltering::new(horizon, k, None, &mut pol_rng);
        for t in 1..=horizon {
            let (i, j) = p.select_pair(t);
            let o = sample_duel(&m, i, j, t, &mut duel_rng).unwrap();
            p.observe(&o);
        }
        assert!(p.working.is_empty(), "working set should empty");
        assert_eq!(p.candidate, 0, "candidate should be the rank-1 arm");
    }
}
