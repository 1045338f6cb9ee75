//! Candidate-tracking dueling policy with randomly scheduled replays.
//!
//! Each round the active base instance plays its candidate arm against a
//! uniform draw from the active set, then (in order) spawns any scheduled
//! replay, checks its duration, evicts arms whose estimated regret crossed
//! the interval criterion, re-evaluates the candidate switching criterion,
//! and restarts the episode when the master arm set empties.
//!
//! One policy object drives the whole interaction; base instances live on an
//! explicit stack. The candidate arm, the round log, and the master set are
//! shared episode-wide; each stack frame keeps its own active set and its
//! own crossing detector anchored at the frame's start round. Master-set
//! evictions take crossings found by any live frame, since every frame's
//! windows lie inside the episode. A frame's own active-set evictions use
//! only windows anchored at that frame.

use super::estimate::{
    switch_check, EstimateLog, IntervalMode, RoundRecord, Thresholds, WindowDetector,
};
use super::{DebugRow, Policy};
use crate::matrix::DuelOutcome;
use crate::rng::{keyed_coin, derive_key, Purpose, RngStream};

/// Construction parameters shared by SWIFT and METASWIFT.
#[derive(Debug, Clone)]
pub struct SwiftConfig {
    pub horizon: usize,
    pub k: usize,
    /// Threshold constant C of the eviction/switching criteria.
    pub c: f64,
    pub master_seed: u64,
    pub trial: u64,
    /// Interval family scanned by the criteria.
    pub interval_mode: IntervalMode,
    /// Collect the per-round debug log.
    pub collect_debug: bool,
}

impl SwiftConfig {
    pub fn new(horizon: usize, k: usize, c: f64, master_seed: u64, trial: u64) -> Self {
        SwiftConfig {
            horizon,
            k,
            c,
            master_seed,
            trial,
            interval_mode: IntervalMode::Dyadic,
            collect_debug: false,
        }
    }
}

/// Run counters, exposed for tests and the harness.
#[derive(Debug, Clone, Copy, Default)]
pub struct SwiftStats {
    pub episodes: usize,
    pub restarts: usize,
    pub candidate_switches: usize,
    pub replays_spawned: usize,
    pub max_stack_depth: usize,
}

struct Frame {
    start: usize,
    duration: usize,
    active: Vec<bool>,
    active_count: usize,
    saved: Vec<bool>,
    saved_count: usize,
    detector: WindowDetector,
}

impl Frame {
    fn new(k: usize, start: usize, duration: usize, mode: IntervalMode) -> Self {
        Frame {
            start,
            duration,
            active: vec![true; k],
            active_count: k,
            saved: vec![true; k],
            saved_count: k,
            detector: WindowDetector::new(k, start, mode),
        }
    }
}

struct Pending {
    sampled: usize,
    active_count: usize,
    depth: usize,
    master_count: usize,
    episode: usize,
}

pub struct MetaSwift {
    horizon: usize,
    k: usize,
    thresholds: Thresholds,
    replays: bool,
    mode: IntervalMode,
    policy_rng: RngStream,
    schedule_key: u64,
    /// Replay durations 2, 4, ..., 2^ceil(log2 T).
    m_levels: Vec<usize>,

    episode: usize,
    episode_start: usize,
    master: Vec<bool>,
    master_count: usize,
    /// Arms with a crossing found by any frame this episode.
    episode_crossed: Vec<bool>,
    log: EstimateLog,
    stack: Vec<Frame>,
    candidate: usize,

    next_round: usize,
    done: bool,
    pending: Option<Pending>,
    restart_rounds: Vec<usize>,
    stats: SwiftStats,
    debug: Option<Vec<DebugRow>>,
}

/// METASWIFT: SWIFT base instances under the random replay schedule, with
/// episode restarts when the master arm set empties.
pub fn metaswift(cfg: SwiftConfig) -> MetaSwift {
    MetaSwift::new(cfg, true)
}

/// Plain SWIFT: a single full-horizon base instance per episode, no replays.
/// Restarts on an empty master set like the meta algorithm, which is what
/// running the base algorithm standalone over a full horizon amounts to.
pub fn swift(cfg: SwiftConfig) -> MetaSwift {
    MetaSwift::new(cfg, false)
}

impl MetaSwift {
    fn new(cfg: SwiftConfig, replays: bool) -> Self {
        assert!(cfg.k >= 1 && cfg.horizon >= 1 && cfg.c > 0.0);
        let mut policy_rng = RngStream::for_trial(cfg.master_seed, cfg.trial, Purpose::Policy);
        let schedule_key = derive_key(cfg.master_seed, &[cfg.trial, 0x5c4e]);
        let mut m_levels = Vec::new();
        let mut m = 2usize;
        while m <= next_pow2(cfg.horizon) {
            m_levels.push(m);
            m *= 2;
        }
        let candidate = policy_rng.uniform_index(cfg.k);
        let root = Frame::new(cfg.k, 1, cfg.horizon, cfg.interval_mode);
        MetaSwift {
            horizon: cfg.horizon,
            k: cfg.k,
            thresholds: Thresholds::new(cfg.c, cfg.horizon, cfg.k),
            replays,
            mode: cfg.interval_mode,
            policy_rng,
            schedule_key,
            m_levels,
            episode: 1,
            episode_start: 1,
            master: vec![true; cfg.k],
            master_count: cfg.k,
            episode_crossed: vec![false; cfg.k],
            log: EstimateLog::new(cfg.k, 1),
            stack: vec![root],
            candidate,
            next_round: 1,
            done: false,
            pending: None,
            restart_rounds: Vec::new(),
            stats: SwiftStats {
                episodes: 1,
                max_stack_depth: 1,
                ..SwiftStats::default()
            },
            debug: cfg.collect_debug.then(Vec::new),
        }
    }

    pub fn stats(&self) -> SwiftStats {
        self.stats
    }

    /// Lazily drawn replay-schedule coin for `(episode, round, level)`.
    fn schedule_coin(&self, round: usize, level_idx: usize) -> bool {
        let m = self.m_levels[level_idx];
        let p = 1.0 / ((m as f64) * ((round - self.episode_start) as f64)).sqrt();
        keyed_coin(
            self.schedule_key,
            &[self.episode as u64, round as u64, level_idx as u64],
            p,
        )
    }

    fn start_new_episode(&mut self, now: usize) {
        if now > self.horizon {
            self.done = true;
            return;
        }
        self.episode += 1;
        self.episode_start = now;
        self.master.iter_mut().for_each(|b| *b = true);
        self.master_count = self.k;
        self.episode_crossed.iter_mut().for_each(|b| *b = false);
        self.log = EstimateLog::new(self.k, now);
        self.stack.clear();
        self.stack
            .push(Frame::new(self.k, now, self.horizon + 1 - now, self.mode));
        self.candidate = self.policy_rng.uniform_index(self.k);
        self.restart_rounds.push(now);
        self.stats.episodes += 1;
        self.stats.restarts += 1;
    }

    /// Duration check, evictions, candidate switch, and restart criterion
    /// for the top frame, cascading pops to suspended parents.
    /// Returns whether a restart happened.
    fn post_steps(&mut self, now: usize) -> bool {
        loop {
            let Some(top) = self.stack.last_mut() else {
                self.start_new_episode(now);
                return true;
            };
            // Duration expiry: this frame returns, its parent resumes and
            // runs its own deferred steps at the current round.
            if now > top.start + top.duration {
                self.stack.pop();
                if self.stack.is_empty() {
                    self.start_new_episode(now);
                    return true;
                }
                continue;
            }
            // Evict from the saved active set via windows anchored at this
            // frame, and from the master set via any crossing this episode.
            let mut count = 0;
            for arm in 0..self.k {
                let keep = top.saved[arm] && !top.detector.crossed(arm);
                top.active[arm] = keep;
                count += usize::from(keep);
            }
            top.active_count = count;
            for arm in 0..self.k {
                if self.episode_crossed[arm] && self.master[arm] {
                    self.master[arm] = false;
                    self.master_count -= 1;
                }
            }
            // Candidate switch over arms still active for this frame.
            let buf: Vec<usize> = (0..self.k)
                .filter(|&a| top.active[a] && a != self.candidate)
                .collect();
            if let Some(arm) =
                switch_check(&self.log, &buf, top.start, &self.thresholds, self.mode)
            {
                self.candidate = arm;
                self.stats.candidate_switches += 1;
            }
            // Restart criterion.
            if self.master_count == 0 {
                self.stack.clear();
                self.start_new_episode(now);
                return true;
            }
            debug_assert!(
                (0..self.k).all(|a| !self.master[a] || self.stack.last().unwrap().active[a]),
                "master set must stay inside the active set"
            );
            return false;
        }
    }
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

impl Policy for MetaSwift {
    fn select_pair(&mut self, round: usize) -> (usize, usize) {
        assert!(!self.done, "policy driven past its horizon");
        assert_eq!(round, self.next_round, "rounds must be played in order");
        let top = self.stack.last().expect("an active base instance exists");
        debug_assert!(top.active_count > 0, "active set must be nonempty");
        let pick = self.policy_rng.uniform_index(top.active_count);
        let sampled = top
            .active
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .nth(pick)
            .map(|(a, _)| a)
            .expect("pick indexes a set bit");
        self.pending = Some(Pending {
            sampled,
            active_count: top.active_count,
            depth: self.stack.len(),
            master_count: self.master_count,
            episode: self.episode,
        });
        (self.candidate, sampled)
    }

    fn observe(&mut self, outcome: &DuelOutcome) {
        let p = self.pending.take().expect("observe follows select_pair");
        let t = self.next_round;
        debug_assert_eq!(outcome.round, t);
        debug_assert_eq!(outcome.pair, (self.candidate, p.sampled));
        self.next_round += 1;
        let now = t + 1;

        let rec = RoundRecord {
            round: t,
            candidate: self.candidate,
            sampled: p.sampled,
            active_count: p.active_count,
            candidate_won: outcome.first_won,
        };
        self.log.push(rec);

        // Every live frame digests the round; crossings feed the episode-wide
        // eviction set.
        for frame in self.stack.iter_mut() {
            for arm in frame.detector.on_round(&self.log, &self.thresholds, now) {
                self.episode_crossed[arm] = true;
            }
        }

        // Save the played frame's current set (restored on resume).
        {
            let top = self.stack.last_mut().expect("frame exists");
            top.saved.copy_from_slice(&top.active);
            top.saved_count = top.active_count;
        }

        // Replay spawn: the interrupting instance plays the next round; this
        // frame's remaining steps wait until the child returns.
        let mut restarted = false;
        let mut spawned = false;
        if self.replays && now <= self.horizon {
            let mut chosen: Option<usize> = None;
            for idx in 0..self.m_levels.len() {
                if self.schedule_coin(now, idx) {
                    chosen = Some(idx);
                }
            }
            if let Some(idx) = chosen {
                let duration = self.m_levels[idx];
                self.stack
                    .push(Frame::new(self.k, now, duration, self.mode));
                self.candidate = self.policy_rng.uniform_index(self.k);
                self.stats.replays_spawned += 1;
                self.stats.max_stack_depth = self.stats.max_stack_depth.max(self.stack.len());
                spawned = true;
            }
        }
        if !spawned {
            restarted = self.post_steps(now);
        }

        if let Some(rows) = self.debug.as_mut() {
            rows.push(DebugRow {
                round: t,
                episode: p.episode,
                stack_depth: p.depth,
                candidate: rec.candidate + 1,
                sampled_arm: rec.sampled + 1,
                active_set_size: p.active_count,
                master_set_size: p.master_count,
                outcome: u8::from(outcome.first_won),
                restart_flag: u8::from(restarted),
            });
        }
    }

    fn restart_rounds(&self) -> &[usize] {
        &self.restart_rounds
    }

    fn debug_rows(&self) -> Option<&[DebugRow]> {
        self.debug.as_deref()
    }
}
