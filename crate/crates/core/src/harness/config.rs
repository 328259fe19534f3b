use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bayes_linear::NigPriorSpec;
use crate::env::EnvironmentSpec;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::imitation::DistillConfig;
use crate::neural::{LrSchedule, RmsPropConfig};
use crate::policies::{BootstrapWeighting, RewardNetConfig};
use crate::rng::RngSeed;

fn linear_prior() -> NigPriorSpec {
    NigPriorSpec::LINEAR_TS
}

fn neural_linear_prior() -> NigPriorSpec {
    NigPriorSpec::NEURAL_LINEAR
}

fn ten() -> usize {
    10
}

/// The base (online-learning) policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySpec {
    Uniform,
    /// Always plays the mean-optimal action; a regret floor for sanity runs.
    Oracle,
    LinearTs {
        #[serde(default = "linear_prior")]
        prior: NigPriorSpec,
    },
    NeuralLinearTs {
        #[serde(default)]
        reward_net: RewardNetConfig,
        #[serde(default = "neural_linear_prior")]
        prior: NigPriorSpec,
    },
    BootstrapTs {
        #[serde(default)]
        reward_net: RewardNetConfig,
        #[serde(default = "ten")]
        n_replicates: usize,
        #[serde(default)]
        weighting: BootstrapWeighting,
    },
    NeuralGreedy {
        #[serde(default)]
        reward_net: RewardNetConfig,
    },
}

impl PolicySpec {
    pub fn label(&self) -> &'static str {
        match self {
            PolicySpec::Uniform => "UniformRandom",
            PolicySpec::Oracle => "Oracle",
            PolicySpec::LinearTs { .. } => "Linear-TS",
            PolicySpec::NeuralLinearTs { .. } => "NeuralLinear-TS",
            PolicySpec::BootstrapTs { .. } => "Bootstrap-NN-TS",
            PolicySpec::NeuralGreedy { .. } => "Neural-Greedy",
        }
    }
}

/// Distillation of the base policy into a softmax network that is deployed
/// in its place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImitationConfig {
    pub hidden: Vec<usize>,
    /// Monte-Carlo draws per context for the propensity table.
    pub n_a: usize,
    pub optimizer: RmsPropConfig,
    pub distill: DistillConfig,
    /// Distil on freshly drawn contexts instead of the observed ones.
    pub fresh_contexts: bool,
    /// Number of fresh contexts per period (defaults to all steps so far).
    pub n_fresh: Option<usize>,
}

impl Default for ImitationConfig {
    fn default() -> Self {
        ImitationConfig {
            hidden: vec![100, 100],
            n_a: 2048,
            optimizer: RmsPropConfig::with_schedule(LrSchedule::IMITATION_NET),
            distill: DistillConfig::default(),
            fresh_contexts: false,
            n_fresh: None,
        }
    }
}

impl ImitationConfig {
    /// Reads the settings alone, as in the `imitation` section of an
    /// experiment config.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let c: ImitationConfig =
            serde_json::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::Config(e.to_string()))?;
        if c.n_a == 0 || c.hidden.iter().any(|h| *h == 0) {
            return Err(Error::Config("imitation.n_a and hidden widths must be positive".into()));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Online decisions per trial.
    pub horizon: usize,
    /// Decisions between offline updates.
    pub batch_period: usize,
    pub n_trials: usize,
    /// Root seed; trial `i` uses a seed derived from `(seed, i)`.
    pub seed: u64,
    /// Explicit per-trial seeds, overriding the derivation.
    pub seeds: Option<Vec<u64>>,
    pub exec: Exec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            horizon: 10_000,
            batch_period: 1000,
            n_trials: 1,
            seed: 0,
            seeds: None,
            exec: Exec::default(),
        }
    }
}

impl RunConfig {
    pub fn trial_seed(&self, trial: usize) -> RngSeed {
        match &self.seeds {
            Some(s) => RngSeed(s[trial]),
            None => RngSeed(self.seed).derive_index(trial as u64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write per-trial step and period logs next to the summary.
    pub per_trial: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            per_trial: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatencyConfig {
    /// Timed decisions per policy.
    pub n_reps: usize,
    /// Calls per timed batch; the standard error is taken over batch means.
    pub batch: usize,
    /// Policies to time after one warm-up update. Defaults to the configured
    /// base policy plus the uniform baseline.
    pub policies: Vec<PolicySpec>,
    /// Also time a distilled imitation policy of the base policy.
    pub imitation: bool,
    /// Distillation minibatches used for warm-up; the weights' values do not
    /// affect the decision cost.
    pub warmup_minibatches: usize,
}

impl Default for LatencyConfig {
    fn default() -> Self {
        LatencyConfig {
            n_reps: 100_000,
            batch: 100,
            policies: Vec::new(),
            imitation: true,
            warmup_minibatches: 50,
        }
    }
}

/// A complete experiment: `{environment, policy, imitation, run, output}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub environment: EnvironmentSpec,
    pub policy: PolicySpec,
    #[serde(default)]
    pub imitation: Option<ImitationConfig>,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub latency: Option<LatencyConfig>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let r = &self.run;
        if r.batch_period == 0 {
            return Err(Error::Config("batch_period must be at least 1".into()));
        }
        if r.horizon < r.batch_period {
            return Err(Error::Config(format!(
                "horizon {} is shorter than batch_period {}",
                r.horizon, r.batch_period
            )));
        }
        if r.n_trials == 0 {
            return Err(Error::Config("n_trials must be at least 1".into()));
        }
        if let Some(s) = &r.seeds {
            if s.len() < r.n_trials {
                return Err(Error::Config(format!("{} seeds for {} trials", s.len(), r.n_trials)));
            }
        }
        if let Some(il) = &self.imitation {
            if il.n_a == 0 {
                return Err(Error::Config("imitation.n_a must be at least 1".into()));
            }
            if il.hidden.iter().any(|h| *h == 0) {
                return Err(Error::Config("imitation.hidden widths must be positive".into()));
            }
            if matches!(self.policy, PolicySpec::Oracle) {
                return Err(Error::Config("the oracle cannot be distilled".into()));
            }
        }
        if let PolicySpec::BootstrapTs { n_replicates: 0, .. } = self.policy {
            return Err(Error::Config("n_replicates must be at least 1".into()));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"environment": {"kind": "wheel"}, "policy": {"kind": "linear_ts"}, "imitation": {}}"#,
        )
        .unwrap();
        assert_eq!(c.run.batch_period, 1000);
        assert_eq!(c.imitation.as_ref().unwrap().n_a, 2048);
        assert_eq!(c.imitation.as_ref().unwrap().distill.n_minibatches, 2000);
        assert!(matches!(c.policy, PolicySpec::LinearTs { prior } if prior == NigPriorSpec::LINEAR_TS));
    }

    #[test]
    fn invalid_periods_rejected() {
        let bad = r#"{"environment": {"kind": "wheel"}, "policy": {"kind": "uniform"},
                      "run": {"horizon": 10, "batch_period": 100}}"#;
        assert!(matches!(ExperimentConfig::from_json(bad), Err(Error::Config(_))));
        let zero = r#"{"environment": {"kind": "wheel"}, "policy": {"kind": "uniform"},
                       "run": {"batch_period": 0}}"#;
        assert!(ExperimentConfig::from_json(zero).is_err());
    }

    #[test]
    fn unknown_policy_is_a_config_error() {
        let c = r#"{"environment": {"kind": "wheel"}, "policy": {"kind": "magic"}}"#;
        assert!(matches!(ExperimentConfig::from_json(c), Err(Error::Config(_))));
    }
}
