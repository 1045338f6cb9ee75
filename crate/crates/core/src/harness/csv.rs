//! CSV and TSV emission. All files are UTF-8 with LF line endings and
//! mandatory headers; float fields use the shortest round-trip decimal form
//! so identical runs produce identical bytes.

use super::run::{RunResult, TrialResult};
use crate::policy::DebugRow;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// Per-round file: `trial,t,cum_regret,restart_flag`. With thinning, a
/// restart is flagged on the first sampled row at or after its round.
pub fn write_rounds_csv(path: &Path, trials: &[TrialResult]) -> io::Result<()> {
    let mut out = String::from("trial,t,cum_regret,restart_flag\n");
    for tr in trials {
        let mut restarts = tr.restart_rounds.iter().peekable();
        for &(t, cum) in &tr.series {
            let mut flag = 0;
            while restarts.peek().is_some_and(|&&r| r <= t) {
                restarts.next();
                flag = 1;
            }
            let _ = writeln!(out, "{},{},{},{}", tr.trial, t, cum, flag);
        }
    }
    std::fs::write(path, out)
}

/// Confidence bands: per-round mean and sample standard deviation of the
/// cumulative regret across trials.
pub fn write_bands_csv(path: &Path, trials: &[TrialResult]) -> io::Result<()> {
    let mut out = String::from("t,mean_cum_regret,std_cum_regret\n");
    if trials.is_empty() {
        return std::fs::write(path, out);
    }
    let n = trials.len();
    let len = trials[0].series.len();
    debug_assert!(trials.iter().all(|t| t.series.len() == len));
    for idx in 0..len {
        let t = trials[0].series[idx].0;
        let mean = trials.iter().map(|tr| tr.series[idx].1).sum::<f64>() / n as f64;
        let std = if n > 1 {
            let ss: f64 = trials
                .iter()
                .map(|tr| (tr.series[idx].1 - mean).powi(2))
                .sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let _ = writeln!(out, "{t},{mean},{std}");
    }
    std::fs::write(path, out)
}

/// Summary file: `policy,env,S,trials,mean_regret,std_regret,mean_restarts`.
/// S is the mean winner-change count over the realized trial traces.
pub fn write_summary_csv(
    path: &Path,
    policy: &str,
    env: &str,
    result: &RunResult,
) -> io::Result<()> {
    let mut out = String::from("policy,env,S,trials,mean_regret,std_regret,mean_restarts\n");
    let mean_s = result.trials.iter().map(|t| t.s_changes as f64).sum::<f64>()
        / result.trials.len() as f64;
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{}",
        policy,
        env,
        mean_s,
        result.trials.len(),
        result.mean_regret,
        result.std_regret,
        result.mean_restarts
    );
    std::fs::write(path, out)
}

/// Tab-separated per-round policy debug log.
pub fn write_debug_tsv(path: &Path, rows: &[DebugRow]) -> io::Result<()> {
    let mut out = String::from(DebugRow::tsv_header());
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_tsv());
        out.push('\n');
    }
    std::fs::write(path, out)
}
