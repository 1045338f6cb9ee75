//! Uniform-random baseline: both arms i.i.d. uniform every round.

use super::Policy;
use crate::matrix::DuelOutcome;
use crate::rng::RngStream;

pub struct RandDuel {
    k: usize,
    rng: RngStream,
}

impl RandDuel {
    pub fn new(k: usize, rng: RngStream) -> Self {
        assert!(k >= 1);
        RandDuel { k, rng }
    }
}

impl Policy for RandDuel {
    fn select_pair(&mut self, _round: usize) -> (usize, usize) {
        (self.rng.uniform_index(self.k), self.rng.uniform_index(self.k))
    }

    fn observe(&mut self, _outcome: &DuelOutcome) {}
}
