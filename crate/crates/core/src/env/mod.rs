//! Benchmark problems. Every environment yields [`Round`]s that carry the
//! true mean reward of each action, so regret never depends on noisy
//! observations.

pub mod data;
pub mod replay;
pub mod synthetic;
pub mod wheel;

use std::path::PathBuf;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use data::{
    dosage_reward, load_supervised_csv, load_supervised_reader, mushroom_reward, RewardRule,
    SupervisedBandit, SupervisedBanditSpec, SupervisedData,
};
pub use replay::{replay_evaluate, replay_step, LoggedDataset, LoggedTuple, ReplayCursor, ReplayOutcome};
pub use synthetic::VideoModel;
pub use wheel::{wheel_sample, WheelBandit, WheelConfig};

use crate::error::{check_dim, Error, Result};
use crate::rng::Rng;
use crate::types::{argmax, ActionId, ContextVector, Reward};

/// How an observed reward scatters around its mean.
#[derive(Debug, Clone, PartialEq)]
pub enum RewardNoise {
    None,
    Gaussian { sigma: f64 },
    /// Eating a poisonous mushroom is a coin flip between +5 and −35.
    Mushroom { poisonous: bool },
    /// Action `a` pays `mean[a] / success[a]` with probability `success[a]`.
    Bernoulli { success: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub context: ContextVector,
    pub mean_rewards: Vec<f64>,
    pub noise: RewardNoise,
}

impl Round {
    pub fn optimal_action(&self) -> ActionId {
        argmax(&self.mean_rewards)
    }

    pub fn best_mean(&self) -> f64 {
        self.mean_rewards.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_a mean(a) − mean(action)`.
    pub fn regret(&self, action: ActionId) -> f64 {
        self.best_mean() - self.mean_rewards[action.0]
    }

    pub fn sample_reward(&self, action: ActionId, rng: &mut Rng) -> Result<Reward> {
        let a = ActionId::checked(action.0, self.mean_rewards.len())?;
        let mean = self.mean_rewards[a.0];
        Ok(Reward(match &self.noise {
            RewardNoise::None => mean,
            RewardNoise::Gaussian { sigma } => {
                mean + Normal::new(0.0, *sigma)
                    .map_err(|e| Error::Invalid(e.to_string()))?
                    .sample(rng)
            }
            RewardNoise::Mushroom { poisonous } => data::mushroom_reward(*poisonous, a, rng).0,
            RewardNoise::Bernoulli { success } => {
                check_dim(self.mean_rewards.len(), success.len())?;
                let p = success[a.0];
                if p > 0.0 && rng.random::<f64>() < p {
                    mean / p
                } else {
                    0.0
                }
            }
        }))
    }
}

pub trait Environment: Send {
    fn name(&self) -> &str;

    fn n_actions(&self) -> usize;

    fn context_dim(&self) -> usize;

    fn next_round(&mut self, rng: &mut Rng) -> Result<Round>;
}

fn default_mushroom_rows() -> usize {
    8124
}

fn default_warfarin_rows() -> usize {
    5528
}

fn default_k_levels() -> usize {
    20
}

/// Declarative environment description used in experiment configs.
///
/// Without a `csv_path` the Mushroom and Warfarin variants generate their
/// synthetic stand-ins from `data_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvironmentSpec {
    Wheel(WheelConfig),
    Mushroom {
        #[serde(default)]
        csv_path: Option<PathBuf>,
        #[serde(default = "default_mushroom_rows")]
        n_rows: usize,
        #[serde(default)]
        data_seed: u64,
    },
    Warfarin {
        #[serde(default)]
        csv_path: Option<PathBuf>,
        #[serde(default = "default_warfarin_rows")]
        n_rows: usize,
        #[serde(default = "default_k_levels")]
        k_levels: usize,
        #[serde(default)]
        data_seed: u64,
    },
    Video,
    Supervised(SupervisedBanditSpec),
}

impl EnvironmentSpec {
    pub fn build(&self) -> Result<Box<dyn Environment>> {
        Ok(match self {
            EnvironmentSpec::Wheel(cfg) => Box::new(WheelBandit::new(*cfg)?),
            EnvironmentSpec::Mushroom {
                csv_path,
                n_rows,
                data_seed,
            } => {
                let spec = synthetic::mushroom_spec(csv_path.clone().unwrap_or_default(), *data_seed);
                let data = match csv_path {
                    Some(_) => load_supervised_csv(&spec)?,
                    None => {
                        let mut buf = Vec::new();
                        synthetic::write_mushroom_csv(*n_rows, *data_seed, &mut buf)?;
                        load_supervised_reader(buf.as_slice(), &spec)?
                    }
                };
                Box::new(SupervisedBandit::new("mushroom", data, &spec.reward_rule)?)
            }
            EnvironmentSpec::Warfarin {
                csv_path,
                n_rows,
                k_levels,
                data_seed,
            } => {
                let spec = synthetic::warfarin_spec(csv_path.clone().unwrap_or_default(), *k_levels, *data_seed);
                let data = match csv_path {
                    Some(_) => load_supervised_csv(&spec)?,
                    None => {
                        let mut buf = Vec::new();
                        synthetic::write_warfarin_csv(*n_rows, *data_seed, &mut buf)?;
                        load_supervised_reader(buf.as_slice(), &spec)?
                    }
                };
                Box::new(SupervisedBandit::new("warfarin", data, &spec.reward_rule)?)
            }
            EnvironmentSpec::Video => Box::new(VideoModel),
            EnvironmentSpec::Supervised(spec) => {
                let data = load_supervised_csv(spec)?;
                Box::new(SupervisedBandit::new("supervised", data, &spec.reward_rule)?)
            }
        })
    }
}
