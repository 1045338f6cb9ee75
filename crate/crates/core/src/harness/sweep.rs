//! Cross-validation sweep for the policy constant.
//!
//! Validation environments are randomly generated geometric BTL traces with
//! changepoint counts sampled across a configured range. Every grid value is
//! evaluated on the same environments; the value minimizing mean regret wins.

use super::config::{ExperimentConfig, PolicyName, PolicySpec};
use super::run::run_policy_on_trace;
use super::HarnessError;
use crate::env::{switching_btl_trace, EnvironmentTrace};
use crate::rng::{Purpose, RngStream};
use rayon::prelude::*;

/// Sweep parameters.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Number of validation environments.
    pub validation_envs: usize,
    /// Changepoint-count range sampled per environment (inclusive).
    pub changepoint_min: usize,
    pub changepoint_max: usize,
    /// Offset folded into validation seeds, letting callers build disjoint
    /// validation sets from one master seed.
    pub seed_offset: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            validation_envs: 20,
            changepoint_min: 0,
            changepoint_max: 1000,
            seed_offset: 0,
        }
    }
}

/// Sweep outcome: the full `(value, mean regret)` table and the argmin.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub table: Vec<(f64, f64)>,
    pub best_c: f64,
}

fn validation_trace(
    config: &ExperimentConfig,
    sweep: &SweepConfig,
    env_idx: usize,
) -> Result<EnvironmentTrace, HarnessError> {
    let k = config.environment.k();
    let horizon = config.environment.horizon();
    let trial = sweep.seed_offset + env_idx as u64;
    let mut rng = RngStream::for_trial(config.master_seed, trial, Purpose::Sweep);
    let span = sweep.changepoint_max - sweep.changepoint_min + 1;
    let count = sweep.changepoint_min + rng.uniform_index(span);
    // Distinct changepoints in (1, T].
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let c = 2 + rng.uniform_index(horizon - 1);
        if !points.contains(&c) {
            points.push(c);
        }
    }
    points.sort_unstable();
    switching_btl_trace(k, horizon, &points, &mut rng)
        .map_err(|source| HarnessError::Trial { trial: env_idx, source })
}

fn spec_with_value(base: &PolicySpec, value: f64) -> PolicySpec {
    let mut spec = base.clone();
    match spec.name {
        PolicyName::Metaswift | PolicyName::Swift => spec.c = value,
        PolicyName::If => spec.delta = Some(value),
        PolicyName::Randduel => {}
    }
    spec
}

/// Evaluate every grid value on the shared validation suite and pick the
/// mean-regret argmin (earliest grid entry on ties).
pub fn sweep_constant(
    config: &ExperimentConfig,
    grid: &[f64],
    sweep: &SweepConfig,
) -> Result<SweepResult, HarnessError> {
    if grid.is_empty() {
        return Err(HarnessError::Config("sweep grid is empty".into()));
    }
    if sweep.validation_envs < 1 {
        return Err(HarnessError::Config("validation_envs must be >= 1".into()));
    }
    if sweep.changepoint_max < sweep.changepoint_min {
        return Err(HarnessError::Config("changepoint range is inverted".into()));
    }
    if sweep.changepoint_max >= config.environment.horizon() {
        return Err(HarnessError::Config(
            "changepoint_max must be < T - 1".into(),
        ));
    }
    config.policy.validate()?;

    let traces: Vec<EnvironmentTrace> = (0..sweep.validation_envs)
        .map(|v| validation_trace(config, sweep, v))
        .collect::<Result<_, _>>()?;

    let mut table = Vec::with_capacity(grid.len());
    for &value in grid {
        let spec = spec_with_value(&config.policy, value);
        let finals: Result<Vec<f64>, HarnessError> = traces
            .par_iter()
            .enumerate()
            .map(|(v, trace)| {
                run_policy_on_trace(
                    trace,
                    &spec,
                    config.master_seed,
                    (sweep.seed_offset as usize).wrapping_add(v),
                    trace.horizon(), // only the final value matters
                    false,
                )
                .map(|r| r.final_regret)
                .map_err(|source| HarnessError::Trial { trial: v, source })
            })
            .collect();
        let finals = finals?;
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        table.push((value, mean));
    }
    let best_c = table
        .iter()
        .fold(None::<(f64, f64)>, |best, &(c, m)| match best {
            Some((_, bm)) if bm <= m => best,
            _ => Some((c, m)),
        })
        .map(|(c, _)| c)
        .expect("nonempty grid");
    Ok(SweepResult { table, best_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::EnvSpec;

    fn sweep_cfg(envs: usize, cp_max: usize) -> (ExperimentConfig, SweepConfig) {
        (
            ExperimentConfig {
                environment: EnvSpec::BtlSwitching {
                    k: 5,
                    t: 2000,
                    changepoints: vec![],
                },
                policy: PolicySpec {
                    name: PolicyName::Metaswift,
                    c: 1.0,
                    delta: None,
                },
                trials: 1,
                master_seed: 77,
                out_dir: None,
                thin: 1,
                parallel: true,
                debug_log: false,
            },
            SweepConfig {
                validation_envs: envs,
                changepoint_min: 0,
                changepoint_max: cp_max,
                seed_offset: 0,
            },
        )
    }

    #[test]
    fn singleton_grid_returns_that_value() {
        let (cfg, sw) = sweep_cfg(3, 5);
        let res = sweep_constant(&cfg, &[0.7], &sw).unwrap();
        assert_eq!(res.best_c, 0.7);
        assert_eq!(res.table.len(), 1);
    }

    #[test]
    fn table_is_deterministic() {
        let (cfg, sw) = sweep_cfg(4, 5);
        let a = sweep_constant(&cfg, &[0.5, 1.0], &sw).unwrap();
        let b = sweep_constant(&cfg, &[0.5, 1.0], &sw).unwrap();
        assert_eq!(a.table, b.table);
        assert_eq!(a.best_c, b.best_c);
    }

    #[test]
    fn empty_grid_is_config_error() {
        let (cfg, sw) = sweep_cfg(2, 5);
        assert!(matches!(
            sweep_constant(&cfg, &[], &sw),
            Err(HarnessError::Config(_))
        ));
    }
}
