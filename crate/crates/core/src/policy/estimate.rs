//! Importance-weighted gap estimates and the interval criteria built on them.
//!
//! Each round with candidate `h` and sampled arm `a_t` yields, for every arm
//! `a`, the estimate `d(h, a) = |A_t| * O_t * 1{a_t = a} - 1/2`, which is an
//! unbiased estimate of the true gap for active arms and -1/2 for inactive
//! ones. Criteria sum these estimates over intervals of rounds; intervals
//! are half-open `[s1, s2)` with threshold
//! `C * ln(T) * sqrt(K*(s2-s1) v K^2)`.

/// One recorded round, sufficient to recompute any interval sum.
#[derive(Debug, Clone, Copy)]
pub struct RoundRecord {
    /// Global round (1-based).
    pub round: usize,
    /// Candidate arm played first.
    pub candidate: usize,
    /// The uniformly sampled opponent.
    pub sampled: usize,
    /// Active-set size at play time.
    pub active_count: usize,
    /// Whether the candidate won the duel.
    pub candidate_won: bool,
}

/// The gap estimate `d_t(h_t, a)` recovered from a round record.
/// The reverse orientation is its negation: `d_t(a, h_t) = -d_t(h_t, a)`.
#[inline]
pub fn gap_estimate(rec: &RoundRecord, arm: usize) -> f64 {
    if rec.sampled == arm {
        rec.active_count as f64 * f64::from(u8::from(rec.candidate_won)) - 0.5
    } else {
        -0.5
    }
}

/// Which interval family the criteria scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntervalMode {
    /// Dyadic-length windows ending at each round plus the full-history
    /// window. Sound: anything it reports crossing also crosses under the
    /// exhaustive scan.
    #[default]
    Dyadic,
    /// Every interval. O(n^2); for small-horizon validation.
    Exact,
}

/// Threshold parameters shared by the eviction and switching criteria.
#[derive(Debug, Clone)]
pub struct Thresholds {
    c: f64,
    ln_t: f64,
    k: usize,
    /// Cached thresholds for dyadic window lengths 2^j.
    dyadic: Vec<f64>,
}

impl Thresholds {
    pub fn new(c: f64, horizon: usize, k: usize) -> Self {
        let ln_t = (horizon as f64).ln().max(1.0);
        let mut dyadic = Vec::new();
        let mut len = 1usize;
        while len <= horizon.max(1) {
            dyadic.push(Self::raw(c, ln_t, k, len));
            len *= 2;
        }
        Thresholds { c, ln_t, k, dyadic }
    }

    #[inline]
    fn raw(c: f64, ln_t: f64, k: usize, n: usize) -> f64 {
        c * ln_t * ((k * n).max(k * k) as f64).sqrt()
    }

    /// Threshold for a window of `n` rounds.
    #[inline]
    pub fn for_len(&self, n: usize) -> f64 {
        if n.is_power_of_two() {
            let j = n.trailing_zeros() as usize;
            if j < self.dyadic.len() {
                return self.dyadic[j];
            }
        }
        Self::raw(self.c, self.ln_t, self.k, n)
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Append-only per-episode log of round records with per-arm prefix sums of
/// the gap estimates, making any interval sum O(1).
#[derive(Debug, Clone)]
pub struct EstimateLog {
    k: usize,
    start_round: usize,
    records: Vec<RoundRecord>,
    /// `prefix[a][i]` = sum of `d_s(h_s, a)` over the first `i` recorded rounds.
    prefix: Vec<Vec<f64>>,
}

impl EstimateLog {
    pub fn new(k: usize, start_round: usize) -> Self {
        EstimateLog {
            k,
            start_round,
            records: Vec::new(),
            prefix: vec![vec![0.0]; k],
        }
    }

    /// First recorded round.
    pub fn start_round(&self) -> usize {
        self.start_round
    }

    /// One past the last recorded round.
    pub fn end_round(&self) -> usize {
        self.start_round + self.records.len()
    }

    pub fn records(&self) -> &[RoundRecord] {
        &self.records
    }

    pub fn push(&mut self, rec: RoundRecord) {
        debug_assert_eq!(rec.round, self.end_round(), "rounds must be recorded in order");
        debug_assert!(rec.sampled < self.k && rec.candidate < self.k);
        for (arm, pref) in self.prefix.iter_mut().enumerate() {
            let last = *pref.last().expect("prefix rows start nonempty");
            pref.push(last + gap_estimate(&rec, arm));
        }
        self.records.push(rec);
    }

    /// Sum of `d_s(h_s, arm)` over rounds `[s1, s2)`.
    #[inline]
    pub fn sum(&self, arm: usize, s1: usize, s2: usize) -> f64 {
        debug_assert!(self.start_round <= s1 && s1 <= s2 && s2 <= self.end_round());
        let lo = s1 - self.start_round;
        let hi = s2 - self.start_round;
        self.prefix[arm][hi] - self.prefix[arm][lo]
    }

    /// Sum of the reversed estimates `d_s(arm, h_s)` over `[s1, s2)`.
    #[inline]
    pub fn reversed_sum(&self, arm: usize, s1: usize, s2: usize) -> f64 {
        -self.sum(arm, s1, s2)
    }
}

/// Eviction criterion: does some `[s1, s2)` within `[lo, hi)` have
/// `sum d(h, arm) >= threshold(s2 - s1)`?
pub fn eviction_check(
    log: &EstimateLog,
    arm: usize,
    lo: usize,
    hi: usize,
    thr: &Thresholds,
    mode: IntervalMode,
) -> bool {
    debug_assert!(lo >= log.start_round() && hi <= log.end_round());
    if hi <= lo {
        return false;
    }
    match mode {
        IntervalMode::Exact => {
            for s2 in (lo + 1)..=hi {
                for s1 in lo..s2 {
                    if log.sum(arm, s1, s2) >= thr.for_len(s2 - s1) {
                        return true;
                    }
                }
            }
            false
        }
        IntervalMode::Dyadic => {
            for s2 in (lo + 1)..=hi {
                if log.sum(arm, lo, s2) >= thr.for_len(s2 - lo) {
                    return true;
                }
                let mut len = 1usize;
                while len <= s2 - lo {
                    if log.sum(arm, s2 - len, s2) >= thr.for_len(len) {
                        return true;
                    }
                    len *= 2;
                }
            }
            false
        }
    }
}

/// Switching criterion over windows ending at the log's current end: returns
/// the active arm with the largest exceedance of
/// `sum d(arm, h) >= threshold(t - s1)` over starts `s1 >= t_start`,
/// ties broken by lowest index.
pub fn switch_check(
    log: &EstimateLog,
    active: &[usize],
    t_start: usize,
    thr: &Thresholds,
    mode: IntervalMode,
) -> Option<usize> {
    let end = log.end_round();
    if end <= t_start {
        return None;
    }
    let mut best: Option<(f64, usize)> = None;
    for &arm in active {
        let mut ex = f64::NEG_INFINITY;
        match mode {
            IntervalMode::Exact => {
                for s1 in t_start..end {
                    ex = ex.max(log.reversed_sum(arm, s1, end) - thr.for_len(end - s1));
                }
            }
            IntervalMode::Dyadic => {
                ex = log.reversed_sum(arm, t_start, end) - thr.for_len(end - t_start);
                let mut len = 1usize;
                while len <= end - t_start {
                    ex = ex.max(log.reversed_sum(arm, end - len, end) - thr.for_len(len));
                    len *= 2;
                }
            }
        }
        if ex >= 0.0 && best.map_or(true, |(b, _)| ex > b) {
            best = Some((ex, arm));
        }
    }
    best.map(|(_, arm)| arm)
}

/// Sticky per-arm crossing detector for one base-algorithm instance.
///
/// Fed every recorded round, it checks the dyadic suffix windows and the
/// full window ending at that round, anchored at the instance's start.
/// Every completed aligned dyadic block is some round's suffix window, so
/// the family covers the dyadic lattice as well. In `Exact` mode all window
/// starts are scanned instead.
#[derive(Debug, Clone)]
pub(crate) struct WindowDetector {
    anchor: usize,
    crossed: Vec<bool>,
    n_crossed: usize,
    mode: IntervalMode,
}

impl WindowDetector {
    pub fn new(k: usize, anchor: usize, mode: IntervalMode) -> Self {
        WindowDetector {
            anchor,
            crossed: vec![false; k],
            n_crossed: 0,
            mode,
        }
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    #[inline]
    pub fn crossed(&self, arm: usize) -> bool {
        self.crossed[arm]
    }

    /// Digest windows ending at `now` (the log must contain rounds up to
    /// `now`). Returns arms newly marked.
    pub fn on_round(&mut self, log: &EstimateLog, thr: &Thresholds, now: usize) -> Vec<usize> {
        debug_assert!(log.end_round() == now);
        let n = now.saturating_sub(self.anchor);
        let mut newly = Vec::new();
        if n == 0 {
            return newly;
        }
        for arm in 0..self.crossed.len() {
            if self.crossed[arm] {
                continue;
            }
            let hit = match self.mode {
                IntervalMode::Dyadic => {
                    let mut hit = log.sum(arm, self.anchor, now) >= thr.for_len(n);
                    let mut len = 1usize;
                    while !hit && len <= n {
                        hit = log.sum(arm, now - len, now) >= thr.for_len(len);
                        len *= 2;
                    }
                    hit
                }
                IntervalMode::Exact => (self.anchor..now)
                    .any(|s1| log.sum(arm, s1, now) >= thr.for_len(now - s1)),
            };
            if hit {
                self.crossed[arm] = true;
                self.n_crossed += 1;
                newly.push(arm);
            }
        }
        newly
    }
}
