//! Policy interface and implementations.
//!
//! A policy selects a pair of arms each round and observes the duel outcome;
//! it never sees the trace's true matrices. All policy randomness comes from
//! the instance's own streams, so trials can run in parallel with no shared
//! state.

mod estimate;
mod interleaved;
mod randduel;
mod swift;

pub use estimate::{
    eviction_check, gap_estimate, switch_check, EstimateLog, IntervalMode, RoundRecord,
    Thresholds,
};
pub use interleaved::InterleavedFiltering;
pub use randduel::RandDuel;
pub use swift::{metaswift, swift, MetaSwift, SwiftConfig, SwiftStats};

use crate::matrix::DuelOutcome;

/// Per-round interaction protocol: `select_pair` then `observe`, exactly
/// once per round, in round order.
pub trait Policy {
    /// Choose the pair `(i_t, j_t)` to duel at round `t` (1-based).
    fn select_pair(&mut self, round: usize) -> (usize, usize);

    /// Receive the outcome of the duel selected this round.
    fn observe(&mut self, outcome: &DuelOutcome);

    /// Rounds at which the policy reset itself (empty for stateless ones).
    fn restart_rounds(&self) -> &[usize] {
        &[]
    }

    /// Per-round debug log, when the policy was built with collection on.
    fn debug_rows(&self) -> Option<&[DebugRow]> {
        None
    }
}

/// One row of the optional per-round policy debug log. Arm and round fields
/// are 1-based, matching the tab-separated external format.
#[derive(Debug, Clone, Copy)]
pub struct DebugRow {
    pub round: usize,
    pub episode: usize,
    pub stack_depth: usize,
    pub candidate: usize,
    pub sampled_arm: usize,
    pub active_set_size: usize,
    pub master_set_size: usize,
    pub outcome: u8,
    pub restart_flag: u8,
}

impl DebugRow {
    pub fn tsv_header() -> &'static str {
        "t\tepisode\tstack_depth\tcandidate\tsampled_arm\tactive_set_size\tmaster_set_size\toutcome\trestart_flag"
    }

    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.round,
            self.episode,
            self.stack_depth,
            self.candidate,
            self.sampled_arm,
            self.active_set_size,
            self.master_set_size,
            self.outcome,
            self.restart_flag
        )
    }
}
