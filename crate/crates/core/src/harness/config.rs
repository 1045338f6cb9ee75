//! Experiment configuration: JSON file plus flag overrides.

use super::HarnessError;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Environment family and parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvSpec {
    /// Geometric BTL, identity ranking, no changes.
    Stationary {
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default = "default_t")]
        t: usize,
    },
    /// Geometric BTL with uniform permutation redraws at the changepoints.
    BtlSwitching {
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default = "default_t")]
        t: usize,
        #[serde(default = "default_changepoints")]
        changepoints: Vec<usize>,
    },
    /// K=3 adversarial mixture with per-round winner flips (SST, not STI).
    Thm1Adversary {
        #[serde(default = "default_adversary_k")]
        k: usize,
        #[serde(default = "default_t")]
        t: usize,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    /// K=3 adversarial mixture satisfying STI but not SST.
    RemarkB1 {
        #[serde(default = "default_adversary_k")]
        k: usize,
        #[serde(default = "default_t")]
        t: usize,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
}

fn default_k() -> usize {
    10
}
fn default_t() -> usize {
    50_000
}
fn default_adversary_k() -> usize {
    3
}
fn default_epsilon() -> f64 {
    1e-3
}
fn default_changepoints() -> Vec<usize> {
    vec![10_000, 20_000, 30_000, 40_000]
}
fn default_trials() -> usize {
    50
}
fn default_thin() -> usize {
    1
}
fn default_parallel() -> bool {
    true
}

impl EnvSpec {
    pub fn k(&self) -> usize {
        match self {
            EnvSpec::Stationary { k, .. }
            | EnvSpec::BtlSwitching { k, .. }
            | EnvSpec::Thm1Adversary { k, .. }
            | EnvSpec::RemarkB1 { k, .. } => *k,
        }
    }

    pub fn horizon(&self) -> usize {
        match self {
            EnvSpec::Stationary { t, .. }
            | EnvSpec::BtlSwitching { t, .. }
            | EnvSpec::Thm1Adversary { t, .. }
            | EnvSpec::RemarkB1 { t, .. } => *t,
        }
    }

    /// Short name used in summary rows.
    pub fn family_name(&self) -> &'static str {
        match self {
            EnvSpec::Stationary { .. } => "stationary",
            EnvSpec::BtlSwitching { .. } => "btl-switching",
            EnvSpec::Thm1Adversary { .. } => "thm1-adversary",
            EnvSpec::RemarkB1 { .. } => "remark-b1",
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let (k, t) = (self.k(), self.horizon());
        if k < 1 {
            return Err(HarnessError::Config("K must be >= 1".into()));
        }
        if t < k {
            return Err(HarnessError::Config(format!("T={t} must be >= K={k}")));
        }
        match self {
            EnvSpec::Thm1Adversary { k, epsilon, .. }
            | EnvSpec::RemarkB1 { k, epsilon, .. } => {
                if *k != 3 {
                    return Err(HarnessError::Config(format!(
                        "adversary environments require K=3, got K={k}"
                    )));
                }
                if !(*epsilon > 0.0 && *epsilon < 0.5) {
                    return Err(HarnessError::Config(format!(
                        "epsilon must be in (0, 1/2), got {epsilon}"
                    )));
                }
            }
            EnvSpec::BtlSwitching { changepoints, t, .. } => {
                let mut prev = 1usize;
                for &c in changepoints {
                    if c <= prev || c > *t {
                        return Err(HarnessError::Config(format!(
                            "changepoints must be sorted, unique, and in (1, T]; offending value {c}"
                        )));
                    }
                    prev = c;
                }
            }
            EnvSpec::Stationary { .. } => {}
        }
        Ok(())
    }
}

/// Policy selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyName {
    Metaswift,
    Swift,
    If,
    Randduel,
}

impl PolicyName {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyName::Metaswift => "metaswift",
            PolicyName::Swift => "swift",
            PolicyName::If => "if",
            PolicyName::Randduel => "randduel",
        }
    }
}

impl std::str::FromStr for PolicyName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "metaswift" => Ok(PolicyName::Metaswift),
            "swift" => Ok(PolicyName::Swift),
            "if" => Ok(PolicyName::If),
            "randduel" => Ok(PolicyName::Randduel),
            other => Err(format!("unknown policy {other:?}")),
        }
    }
}

/// Policy spec: name plus the constants the named policy reads.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub name: PolicyName,
    /// Threshold constant C for swift/metaswift.
    #[serde(default = "default_c")]
    pub c: f64,
    /// Confidence rescale for interleaved filtering.
    #[serde(default)]
    pub delta: Option<f64>,
}

fn default_c() -> f64 {
    1.0
}

impl PolicySpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if matches!(self.name, PolicyName::Metaswift | PolicyName::Swift) && self.c <= 0.0 {
            return Err(HarnessError::Config(format!(
                "C must be positive, got {}",
                self.c
            )));
        }
        Ok(())
    }
}

/// Full experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvSpec,
    pub policy: PolicySpec,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Output directory for CSV files; no files are written when absent.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Keep every n-th round in the per-round regret series.
    #[serde(default = "default_thin")]
    pub thin: usize,
    /// Run trials on the rayon pool (per-trial results are identical either way).
    #[serde(default = "default_parallel")]
    pub parallel: bool,
    /// Collect per-round policy debug logs (swift/metaswift only).
    #[serde(default)]
    pub debug_log: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials < 1 {
            return Err(HarnessError::Config("trials must be >= 1".into()));
        }
        if self.thin < 1 {
            return Err(HarnessError::Config("thin must be >= 1".into()));
        }
        self.environment.validate()?;
        self.policy.validate()
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| HarnessError::Config(format!("bad config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
