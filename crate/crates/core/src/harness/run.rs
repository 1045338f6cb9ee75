//! Seeded trial execution and aggregation.

use super::config::{EnvSpec, ExperimentConfig, PolicyName, PolicySpec};
use super::csv::{write_bands_csv, write_debug_tsv, write_rounds_csv, write_summary_csv};
use super::HarnessError;
use crate::env::{
    condorcet_lower_bound_trace, geometric_btl, identity_ranking, sst_violating_trace,
    switching_btl_trace, EnvironmentTrace,
};
use crate::error::CoreError;
use crate::matrix::sample_duel;
use crate::oracle::count_changes;
use crate::policy::{
    metaswift, swift, DebugRow, InterleavedFiltering, Policy, RandDuel, SwiftConfig,
};
use crate::rng::{Purpose, RngStream};
use rayon::prelude::*;

/// Outcome of one trial.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: usize,
    pub final_regret: f64,
    /// Cumulative regret at sampled rounds `(t, cum_regret)`; every round
    /// when `thin = 1`, always including round T.
    pub series: Vec<(usize, f64)>,
    /// Rounds at which the policy restarted.
    pub restart_rounds: Vec<usize>,
    /// Winner changes of the realized trace (the oracle's S).
    pub s_changes: usize,
    pub debug_rows: Option<Vec<DebugRow>>,
}

/// Aggregate over trials.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub trials: Vec<TrialResult>,
    pub mean_regret: f64,
    /// Sample standard deviation (N-1 denominator); 0 when undefined.
    pub std_regret: f64,
    pub mean_restarts: f64,
    /// False when trials = 1 and the deviation is reported as 0.
    pub sigma_defined: bool,
}

/// Build the trial's environment from its substream.
pub fn build_trace(
    env: &EnvSpec,
    master_seed: u64,
    trial: usize,
) -> Result<EnvironmentTrace, CoreError> {
    let mut rng = RngStream::for_trial(master_seed, trial as u64, Purpose::Environment);
    match env {
        EnvSpec::Stationary { k, t } => {
            let m = geometric_btl(*k, &identity_ranking(*k))?;
            EnvironmentTrace::piecewise(*t, vec![(1, m)])
        }
        EnvSpec::BtlSwitching { k, t, changepoints } => {
            switching_btl_trace(*k, *t, changepoints, &mut rng)
        }
        EnvSpec::Thm1Adversary { t, epsilon, .. } => {
            condorcet_lower_bound_trace(*t, *epsilon, &mut rng)
        }
        EnvSpec::RemarkB1 { t, epsilon, .. } => sst_violating_trace(*t, *epsilon, &mut rng),
    }
}

fn build_policy(
    spec: &PolicySpec,
    k: usize,
    horizon: usize,
    master_seed: u64,
    trial: usize,
    collect_debug: bool,
) -> Box<dyn Policy> {
    match spec.name {
        PolicyName::Metaswift | PolicyName::Swift => {
            let mut cfg = SwiftConfig::new(horizon, k, spec.c, master_seed, trial as u64);
            cfg.collect_debug = collect_debug;
            if spec.name == PolicyName::Metaswift {
                Box::new(metaswift(cfg))
            } else {
                Box::new(swift(cfg))
            }
        }
        PolicyName::If => {
            let mut rng = RngStream::for_trial(master_seed, trial as u64, Purpose::Policy);
            Box::new(InterleavedFiltering::new(horizon, k, spec.delta, &mut rng))
        }
        PolicyName::Randduel => Box::new(RandDuel::new(
            k,
            RngStream::for_trial(master_seed, trial as u64, Purpose::Policy),
        )),
    }
}

/// Run one policy over one trace: step the interaction protocol, sample
/// duels from the true matrices, and score exact dynamic regret per round.
pub fn run_policy_on_trace(
    trace: &EnvironmentTrace,
    spec: &PolicySpec,
    master_seed: u64,
    trial: usize,
    thin: usize,
    collect_debug: bool,
) -> Result<TrialResult, CoreError> {
    let horizon = trace.horizon();
    let mut policy = build_policy(spec, trace.k(), horizon, master_seed, trial, collect_debug);
    let mut duel_rng = RngStream::for_trial(master_seed, trial as u64, Purpose::Duel);
    let mut cum = 0.0f64;
    let mut series = Vec::with_capacity(horizon / thin + 1);
    for t in 1..=horizon {
        let (i, j) = policy.select_pair(t);
        let outcome = sample_duel(trace.matrix_at(t), i, j, t, &mut duel_rng)?;
        policy.observe(&outcome);
        let w = trace
            .winner_at(t)
            .ok_or(CoreError::NoCondorcetWinner { round: t })?;
        let m = trace.matrix_at(t);
        cum += (m.prob(w, i) - 0.5 + m.prob(w, j) - 0.5) / 2.0;
        if t % thin == 0 || t == horizon {
            series.push((t, cum));
        }
    }
    let (_, s_changes) = count_changes(trace);
    Ok(TrialResult {
        trial,
        final_regret: cum,
        series,
        restart_rounds: policy.restart_rounds().to_vec(),
        s_changes,
        debug_rows: policy.debug_rows().map(|r| r.to_vec()),
    })
}

/// One seeded trial of the configured experiment.
pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<TrialResult, HarnessError> {
    let trace = build_trace(&config.environment, config.master_seed, trial)
        .map_err(|source| HarnessError::Trial { trial, source })?;
    run_policy_on_trace(
        &trace,
        &config.policy,
        config.master_seed,
        trial,
        config.thin,
        config.debug_log,
    )
    .map_err(|source| HarnessError::Trial { trial, source })
}

fn aggregate(trials: Vec<TrialResult>) -> RunResult {
    let n = trials.len();
    let sum: f64 = trials.iter().map(|t| t.final_regret).sum();
    let mean_regret = sum / n as f64;
    let sigma_defined = n > 1;
    let std_regret = if sigma_defined {
        let ss: f64 = trials
            .iter()
            .map(|t| (t.final_regret - mean_regret).powi(2))
            .sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mean_restarts =
        trials.iter().map(|t| t.restart_rounds.len() as f64).sum::<f64>() / n as f64;
    RunResult {
        trials,
        mean_regret,
        std_regret,
        mean_restarts,
        sigma_defined,
    }
}

/// Run all configured trials and aggregate. Writes CSV output when the
/// config names an output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunResult, HarnessError> {
    config.validate()?;
    let results: Result<Vec<TrialResult>, HarnessError> = if config.parallel {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(config, i))
            .collect()
    } else {
        (0..config.trials).map(|i| run_trial(config, i)).collect()
    };
    let result = aggregate(results?);

    if let Some(dir) = &config.out_dir {
        std::fs::create_dir_all(dir)?;
        write_rounds_csv(&dir.join("rounds.csv"), &result.trials)?;
        write_bands_csv(&dir.join("bands.csv"), &result.trials)?;
        write_summary_csv(
            &dir.join("summary.csv"),
            config.policy.name.as_str(),
            config.environment.family_name(),
            &result,
        )?;
        if config.debug_log {
            for tr in &result.trials {
                if let Some(rows) = &tr.debug_rows {
                    write_debug_tsv(&dir.join(format!("policy_debug_trial{:04}.tsv", tr.trial)), rows)?;
                }
            }
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn randduel_config(t: usize, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            environment: EnvSpec::Stationary { k: 10, t },
            policy: PolicySpec {
                name: PolicyName::Randduel,
                c: 1.0,
                delta: None,
            },
            trials,
            master_seed: 42,
            out_dir: None,
            thin: 1,
            parallel: true,
            debug_log: false,
        }
    }

    #[test]
    fn randduel_matches_closed_form_single_trial() {
        // E[regret] = T * mean winner gap = T * 0.37374521...
        let cfg = randduel_config(50_000, 1);
        let r = run_trial(&cfg, 0).unwrap();
        assert!(
            (r.final_regret - 18_687.26).abs() < 200.0,
            "regret = {}",
            r.final_regret
        );
    }

    #[test]
    fn series_is_nondecreasing_and_ends_at_final() {
        let cfg = randduel_config(2000, 1);
        let r = run_trial(&cfg, 0).unwrap();
        assert_eq!(r.series.len(), 2000);
        assert!(r.series.windows(2).all(|w| w[0].1 <= w[1].1));
        assert_eq!(r.series.last().unwrap().1, r.final_regret);
    }

    #[test]
    fn parallel_and_serial_agree_per_trial() {
        let mut cfg = randduel_config(3000, 8);
        let par = run_experiment(&cfg).unwrap();
        cfg.parallel = false;
        let ser = run_experiment(&cfg).unwrap();
        assert_eq!(par.trials.len(), ser.trials.len());
        for (a, b) in par.trials.iter().zip(&ser.trials) {
            assert_eq!(a.final_regret, b.final_regret);
            assert_eq!(a.series, b.series);
        }
        assert_eq!(par.mean_regret, ser.mean_regret);
        assert_eq!(par.std_regret, ser.std_regret);
    }

    #[test]
    fn aggregation_is_exact() {
        let cfg = randduel_config(500, 5);
        let res = run_experiment(&cfg).unwrap();
        let finals: Vec<f64> = res.trials.iter().map(|t| t.final_regret).collect();
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        assert_eq!(res.mean_regret, mean);
        let ss: f64 = finals.iter().map(|f| (f - mean).powi(2)).sum();
        assert_eq!(res.std_regret, (ss / 4.0).sqrt());
        assert!(res.sigma_defined);
    }

    #[test]
    fn single_trial_sigma_flagged() {
        let cfg = randduel_config(200, 1);
        let res = run_experiment(&cfg).unwrap();
        assert!(!res.sigma_defined);
        assert_eq!(res.std_regret, 0.0);
    }

    #[test]
    fn thinning_keeps_final_round() {
        let mut cfg = randduel_config(1000, 1);
        cfg.thin = 300;
        let r = run_trial(&cfg, 0).unwrap();
        let rounds: Vec<usize> = r.series.iter().map(|s| s.0).collect();
        assert_eq!(rounds, vec![300, 600, 900, 1000]);
    }

    #[test]
    fn metaswift_runs_end_to_end() {
        let cfg = ExperimentConfig {
            environment: EnvSpec::BtlSwitching {
                k: 5,
                t: 3000,
                changepoints: vec![1500],
            },
            policy: PolicySpec {
                name: PolicyName::Metaswift,
                c: 1.0,
                delta: None,
            },
            trials: 3,
            master_seed: 9,
            out_dir: None,
            thin: 100,
            parallel: true,
            debug_log: false,
        };
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.trials.len(), 3);
        for t in &res.trials {
            assert!(t.final_regret >= 0.0);
            assert!(t.s_changes <= 1);
        }
    }
}
