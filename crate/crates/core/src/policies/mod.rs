//! Reward-model policies: Linear-TS, NeuralLinear-TS, Bootstrap-NN-TS and
//! Neural-Greedy. All break argmax ties toward the lowest action index.

mod bootstrap;
mod linear_ts;
mod neural_greedy;
mod neural_linear;

pub use bootstrap::{BootstrapTs, BootstrapWeighting};
pub use linear_ts::LinearTs;
pub use neural_greedy::NeuralGreedy;
pub use neural_linear::NeuralLinearTs;

use serde::{Deserialize, Serialize};

use crate::neural::{LrSchedule, RewardTrainConfig, RmsPropConfig};

/// Shared settings for the reward networks of the neural policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardNetConfig {
    pub hidden: Vec<usize>,
    pub optimizer: RmsPropConfig,
    pub train: RewardTrainConfig,
}

impl Default for RewardNetConfig {
    fn default() -> Self {
        RewardNetConfig {
            hidden: vec![100, 100],
            optimizer: RmsPropConfig::with_schedule(LrSchedule::REWARD_NET),
            train: RewardTrainConfig::default(),
        }
    }
}
