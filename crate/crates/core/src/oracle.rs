//! Ground-truth evaluation: significant winner switches, dynamic regret,
//! and the companion non-stationarity measures.
//!
//! Everything here sees the full trace with true gaps; policies never do.
//! Intervals of rounds are half-open throughout: `[s1, s2)` covers the
//! `s2 - s1` rounds `s1, ..., s2-1`, and the significance threshold for such
//! an interval is `sqrt(K * (s2 - s1))`.

use crate::env::EnvironmentTrace;
use crate::error::CoreError;
use crate::matrix::MATRIX_TOL;
use serde::Serialize;

/// How interval starts are scanned when searching for significant regret.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanMode {
    /// All interval starts. O(T^2) per phase worst case.
    #[default]
    Exact,
    /// Dyadic suffix starts plus the phase start. Cheaper, may mark arms
    /// later than the exact scan; the report is labeled approximate.
    Approx,
}

/// One significant phase `[start, end)`.
#[derive(Debug, Clone, Serialize)]
pub struct Phase {
    /// First round of the phase.
    pub start: usize,
    /// One past the last round; the trailing phase is closed at T+1.
    pub end: usize,
    /// The last arm to incur significant regret in the phase, or, if the
    /// phase never completed, the lowest-indexed arm that never incurred
    /// significant regret (1-based).
    pub last_safe_arm: usize,
    /// For each arm, the earliest round at which it had accumulated
    /// significant regret on some sub-interval of the phase.
    #[serde(skip)]
    pub per_arm_first_sig: Vec<Option<usize>>,
}

/// Output of [`significant_shifts`].
#[derive(Debug, Clone)]
pub struct SigShiftReport {
    /// Shift rounds with the convention `tau[0] = 1`.
    pub tau: Vec<usize>,
    /// Phases partitioning `[1, T+1)`.
    pub phases: Vec<Phase>,
    /// Number of significant shifts: `tau.len() - 1`.
    pub sig_count: usize,
    /// Whether the approximate scan produced this report.
    pub approximate: bool,
}

fn check_cw(trace: &EnvironmentTrace) -> Result<(), CoreError> {
    if trace.condorcet_everywhere() {
        return Ok(());
    }
    for t in 1..=trace.horizon() {
        if trace.winner_at(t).is_none() {
            return Err(CoreError::NoCondorcetWinner { round: t });
        }
    }
    unreachable!()
}

/// Whether arm `a` has significant regret over the rounds `[s1, s2)`:
/// the cumulative winner gap meets `sqrt(K * (s2 - s1))`, inequality taken
/// literally at equality.
pub fn has_significant_regret(
    trace: &EnvironmentTrace,
    arm: usize,
    s1: usize,
    s2: usize,
) -> Result<bool, CoreError> {
    if arm >= trace.k() {
        return Err(CoreError::ArmOutOfRange {
            arm: arm + 1,
            k: trace.k(),
        });
    }
    if !(1 <= s1 && s1 < s2 && s2 <= trace.horizon() + 1) {
        return Err(CoreError::InvalidArgument(format!(
            "interval [{s1}, {s2}) must satisfy 1 <= s1 < s2 <= T+1"
        )));
    }
    let mut sum = 0.0;
    for t in s1..s2 {
        sum += trace.winner_gap(t, arm)?;
    }
    Ok(sum >= (trace.k() as f64 * (s2 - s1) as f64).sqrt())
}

/// Per-round winner-gap table, `g[t-1][a]`.
fn winner_gap_table(trace: &EnvironmentTrace) -> Result<Vec<Vec<f64>>, CoreError> {
    check_cw(trace)?;
    let k = trace.k();
    let mut g = Vec::with_capacity(trace.horizon());
    for t in 1..=trace.horizon() {
        let w = trace.winner_at(t).expect("checked above");
        let m = trace.matrix_at(t);
        g.push((0..k).map(|a| m.prob(w, a) - 0.5).collect());
    }
    Ok(g)
}

/// Compute the significant CW switches of a Condorcet-class trace.
///
/// Scans forward from each phase start, marking each arm at the first round
/// by which some sub-interval of the phase gives it significant regret; a
/// shift is recorded at the first round where every arm is marked. Marking
/// is monotone: a marked arm stays marked for the rest of the phase.
pub fn significant_shifts(
    trace: &EnvironmentTrace,
    mode: ScanMode,
) -> Result<SigShiftReport, CoreError> {
    let gaps = winner_gap_table(trace)?;
    let k = trace.k();
    let horizon = trace.horizon();
    let kf = k as f64;

    let mut tau = vec![1usize];
    let mut phases = Vec::new();
    let mut phase_start = 1usize;

    while phase_start <= horizon {
        let mut first_sig: Vec<Option<usize>> = vec![None; k];
        let mut unmarked = k;
        // prefix[a][i] = sum of winner gaps of arm a over the first i rounds
        // of the phase.
        let mut prefix: Vec<Vec<f64>> = vec![vec![0.0]; k];
        let mut shift_at = None;

        for t in phase_start..=horizon {
            let rel_end = t - phase_start + 1;
            for a in 0..k {
                let last = *prefix[a].last().expect("nonempty");
                prefix[a].push(last + gaps[t - 1][a]);
            }
            for a in 0..k {
                if first_sig[a].is_some() {
                    debug_assert!(first_sig[a].unwrap() <= t, "marking must be monotone");
                    continue;
                }
                let end_sum = prefix[a][rel_end];
                let crossed = match mode {
                    ScanMode::Exact => (0..rel_end).any(|s| {
                        end_sum - prefix[a][s] >= (kf * (rel_end - s) as f64).sqrt()
                    }),
                    ScanMode::Approx => {
                        let mut hit =
                            end_sum - prefix[a][0] >= (kf * rel_end as f64).sqrt();
                        let mut len = 1usize;
                        while !hit && len <= rel_end {
                            let s = rel_end - len;
                            hit = end_sum - prefix[a][s] >= (kf * len as f64).sqrt();
                            len *= 2;
                        }
                        hit
                    }
                };
                if crossed {
                    first_sig[a] = Some(t);
                    unmarked -= 1;
                }
            }
            if unmarked == 0 && t > phase_start {
                shift_at = Some(t);
                break;
            }
        }

        match shift_at {
            Some(next) => {
                let last_t = first_sig.iter().map(|m| m.unwrap()).max().unwrap();
                let last_safe = (0..k).find(|&a| first_sig[a] == Some(last_t)).unwrap();
                phases.push(Phase {
                    start: phase_start,
                    end: next,
                    last_safe_arm: last_safe,
                    per_arm_first_sig: first_sig,
                });
                tau.push(next);
                phase_start = next;
            }
            None => {
                let last_safe = (0..k).find(|&a| first_sig[a].is_none()).expect(
                    "an incomplete phase has at least one unmarked arm",
                );
                phases.push(Phase {
                    start: phase_start,
                    end: horizon + 1,
                    last_safe_arm: last_safe,
                    per_arm_first_sig: first_sig,
                });
                break;
            }
        }
    }

    debug_assert!(tau.windows(2).all(|w| w[0] < w[1]));
    debug_assert_eq!(phases.first().map(|p| p.start), Some(1));
    debug_assert_eq!(phases.last().map(|p| p.end), Some(horizon + 1));

    Ok(SigShiftReport {
        sig_count: tau.len() - 1,
        tau,
        phases,
        approximate: mode == ScanMode::Approx,
    })
}

/// Exact dynamic regret of a sequence of played pairs against the trace's
/// Condorcet winners, using true gaps.
pub fn dynamic_regret(
    trace: &EnvironmentTrace,
    plays: &[(usize, usize)],
) -> Result<f64, CoreError> {
    if plays.len() != trace.horizon() {
        return Err(CoreError::InvalidArgument(format!(
            "got {} plays for horizon {}",
            plays.len(),
            trace.horizon()
        )));
    }
    check_cw(trace)?;
    let k = trace.k();
    let mut total = 0.0;
    for (idx, &(i, j)) in plays.iter().enumerate() {
        let t = idx + 1;
        if i >= k || j >= k {
            return Err(CoreError::ArmOutOfRange { arm: i.max(j) + 1, k });
        }
        let w = trace.winner_at(t).expect("checked above");
        let m = trace.matrix_at(t);
        total += (m.prob(w, i) - 0.5 + m.prob(w, j) - 0.5) / 2.0;
    }
    Ok(total)
}

/// Condorcet winner variation
/// `V_T = sum_{t=2}^T max_a |P_t(a*_t, a) - P_{t-1}(a*_t, a)|`.
pub fn cw_variation(trace: &EnvironmentTrace) -> Result<f64, CoreError> {
    check_cw(trace)?;
    let k = trace.k();
    let mut total = 0.0;
    for t in 2..=trace.horizon() {
        let w = trace.winner_at(t).expect("checked above");
        let cur = trace.matrix_at(t);
        let prev = trace.matrix_at(t - 1);
        let mut m = 0.0f64;
        for a in 0..k {
            m = m.max((cur.prob(w, a) - prev.prob(w, a)).abs());
        }
        total += m;
    }
    Ok(total)
}

/// `(L, S)`: the number of rounds where the matrix changes, and the number
/// of rounds where the (tie-broken) winner changes.
pub fn count_changes(trace: &EnvironmentTrace) -> (usize, usize) {
    let mut l = 0;
    let mut s = 0;
    for t in 1..trace.horizon() {
        if trace.matrix_at(t).differs_from(trace.matrix_at(t + 1), MATRIX_TOL) {
            l += 1;
        }
        if trace.winner_at(t) != trace.winner_at(t + 1) {
            s += 1;
        }
    }
    (l, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{
        condorcet_lower_bound_trace, geometric_btl, identity_ranking, switching_btl_trace,
    };
    use crate::matrix::PreferenceMatrix;
    use crate::rng::{Purpose, RngStream};

    fn stationary_btl(k: usize, horizon: usize) -> EnvironmentTrace {
        let m = geometric_btl(k, &identity_ranking(k)).unwrap();
        EnvironmentTrace::piecewise(horizon, vec![(1, m)]).unwrap()
    }

    #[test]
    fn best_arm_never_significant() {
        let tr = stationary_btl(10, 2000);
        for (s1, s2) in [(1, 2), (1, 1000), (500, 2001), (1, 2001)] {
            assert!(!has_significant_regret(&tr, 0, s1, s2).unwrap());
        }
    }

    #[test]
    fn rank_two_arm_threshold_at_360() {
        // Gap 1/6 per round: n/6 >= sqrt(10 n) iff n >= 360.
        let tr = stationary_btl(10, 1000);
        assert!(!has_significant_regret(&tr, 1, 1, 360).unwrap());
        assert!(has_significant_regret(&tr, 1, 1, 361).unwrap());
        assert!(has_significant_regret(&tr, 1, 101, 461).unwrap());
        assert!(!has_significant_regret(&tr, 1, 101, 460).unwrap());
    }

    #[test]
    fn interval_validation() {
        let tr = stationary_btl(3, 100);
        assert!(has_significant_regret(&tr, 0, 5, 5).is_err());
        assert!(has_significant_regret(&tr, 0, 0, 5).is_err());
        assert!(has_significant_regret(&tr, 0, 1, 102).is_err());
        assert!(has_significant_regret(&tr, 3, 1, 2).is_err());
    }

    #[test]
    fn thm1_safe_arm_never_significant() {
        let mut rng = RngStream::for_trial(21, 0, Purpose::Environment);
        let tr = condorcet_lower_bound_trace(2000, 0.001, &mut rng).unwrap();
        for (s1, s2) in [(1, 2001), (1, 500), (700, 1500)] {
            assert!(!has_significant_regret(&tr, 1, s1, s2).unwrap());
        }
    }

    #[test]
    fn stationary_trace_one_phase() {
        let tr = stationary_btl(5, 800);
        let rep = significant_shifts(&tr, ScanMode::Exact).unwrap();
        assert_eq!(rep.sig_count, 0);
        assert_eq!(rep.tau, vec![1]);
        assert_eq!(rep.phases.len(), 1);
        assert_eq!(rep.phases[0].start, 1);
        assert_eq!(rep.phases[0].end, 801);
        assert_eq!(rep.phases[0].last_safe_arm, 0);
    }

    #[test]
    fn alternating_blocks_produce_shifts() {
        // K=2, winner flips by gap 1/2 in blocks of 50: each arm accrues
        // significant regret within each pair of adjacent blocks.
        let a = PreferenceMatrix::from_rows(&[vec![0.5, 1.0], vec![0.0, 0.5]]).unwrap();
        let b = PreferenceMatrix::from_rows(&[vec![0.5, 0.0], vec![1.0, 0.5]]).unwrap();
        let mut segs = Vec::new();
        for block in 0..8 {
            let m = if block % 2 == 0 { a.clone() } else { b.clone() };
            segs.push((block * 50 + 1, m));
        }
        let tr = EnvironmentTrace::piecewise(400, segs).unwrap();
        let rep = significant_shifts(&tr, ScanMode::Exact).unwrap();
        assert!(rep.sig_count >= 3, "sig_count = {}", rep.sig_count);
        // Phase-length invariant: every completed phase is at least K/4 long.
        for p in &rep.phases[..rep.phases.len() - 1] {
            assert!(p.end - p.start >= 1);
        }
        // Phases partition [1, T+1).
        let mut cursor = 1;
        for p in &rep.phases {
            assert_eq!(p.start, cursor);
            cursor = p.end;
        }
        assert_eq!(cursor, 401);
    }

    #[test]
    fn approx_scan_never_marks_earlier_than_exact() {
        let mut rng = RngStream::for_trial(31, 0, Purpose::Environment);
        let tr = switching_btl_trace(4, 600, &[150, 300, 450], &mut rng).unwrap();
        let exact = significant_shifts(&tr, ScanMode::Exact).unwrap();
        let approx = significant_shifts(&tr, ScanMode::Approx).unwrap();
        assert!(approx.approximate);
        assert!(!exact.approximate);
        // The approximate scan checks a subset of intervals, so every shift
        // it reports is at or after the exact shift.
        for (e, a) in exact.tau.iter().zip(approx.tau.iter()) {
            assert!(a >= e);
        }
    }

    #[test]
    fn dynamic_regret_zero_for_winner_plays() {
        let tr = stationary_btl(4, 300);
        let plays = vec![(0usize, 0usize); 300];
        assert_eq!(dynamic_regret(&tr, &plays).unwrap(), 0.0);
    }

    #[test]
    fn dynamic_regret_single_round_pair() {
        // One round, (rank-1, rank-2): (0 + 1/6)/2 = 1/12.
        let tr = stationary_btl(10, 1);
        let dr = dynamic_regret(&tr, &[(0, 1)]).unwrap();
        assert!((dr - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn dynamic_regret_is_additive_and_nonnegative() {
        let mut rng = RngStream::for_trial(8, 0, Purpose::Environment);
        let tr = switching_btl_trace(5, 200, &[100], &mut rng).unwrap();
        let mut pol = RngStream::for_trial(8, 0, Purpose::Policy);
        let plays: Vec<(usize, usize)> = (0..200)
            .map(|_| (pol.uniform_index(5), pol.uniform_index(5)))
            .collect();
        let total = dynamic_regret(&tr, &plays).unwrap();
        assert!(total >= 0.0);
        // Additivity over a round partition.
        let head: f64 = (1..=120)
            .map(|t| {
                let w = tr.winner_at(t).unwrap();
                let m = tr.matrix_at(t);
                let (i, j) = plays[t - 1];
                (m.prob(w, i) - 0.5 + m.prob(w, j) - 0.5) / 2.0
            })
            .sum();
        let tail: f64 = (121..=200)
            .map(|t| {
                let w = tr.winner_at(t).unwrap();
                let m = tr.matrix_at(t);
                let (i, j) = plays[t - 1];
                (m.prob(w, i) - 0.5 + m.prob(w, j) - 0.5) / 2.0
            })
            .sum();
        assert!((head + tail - total).abs() < 1e-9);
    }

    #[test]
    fn dynamic_regret_length_mismatch() {
        let tr = stationary_btl(3, 10);
        assert!(dynamic_regret(&tr, &[(0, 0); 9]).is_err());
    }

    #[test]
    fn variation_zero_when_stationary() {
        let tr = stationary_btl(6, 50);
        assert_eq!(cw_variation(&tr).unwrap(), 0.0);
        assert_eq!(count_changes(&tr), (0, 0));
    }

    #[test]
    fn variation_counts_mixture_flips() {
        let mut rng = RngStream::for_trial(51, 0, Purpose::Environment);
        let tr = condorcet_lower_bound_trace(4000, 0.01, &mut rng).unwrap();
        let (l, s) = count_changes(&tr);
        // Each round flips with probability 1/2.
        assert!((l as f64 - 2000.0).abs() < 200.0, "L = {l}");
        assert_eq!(l, s);
        // Each flip contributes 1 via the 0 <-> 1 entry.
        let v = cw_variation(&tr).unwrap();
        assert!((v - l as f64).abs() < 1e-9, "V_T = {v}, L = {l}");
    }

    #[test]
    fn single_changepoint_variation() {
        // Swap ranks of arms 1 and 2 once: V_T equals the max entry change
        // of that one transition, measured against the new winner's row.
        let m1 = geometric_btl(3, &[1, 2, 3]).unwrap();
        let m2 = geometric_btl(3, &[2, 1, 3]).unwrap();
        let tr = EnvironmentTrace::piecewise(10, vec![(1, m1.clone()), (6, m2.clone())]).unwrap();
        let expect = (0..3)
            .map(|a| (m2.prob(1, a) - m1.prob(1, a)).abs())
            .fold(0.0f64, f64::max);
        let v = cw_variation(&tr).unwrap();
        assert!((v - expect).abs() < 1e-15);
        assert_eq!(count_changes(&tr), (1, 1));
    }

    #[test]
    fn four_changepoint_btl_counts() {
        let mut rng = RngStream::for_trial(61, 0, Purpose::Environment);
        let tr = switching_btl_trace(10, 2000, &[400, 800, 1200, 1600], &mut rng).unwrap();
        let (l, s) = count_changes(&tr);
        assert!(l <= 4);
        assert!(s <= l);
    }
}
