//! Dense feed-forward networks with hand-derived gradients, RMSProp with an
//! inverse-time learning-rate schedule, and masked multi-output reward
//! regression.

mod mlp;
mod rmsprop;
mod train;

pub use mlp::{Activation, BatchTrace, Mlp, MlpSpec, OutputHead};
pub use rmsprop::{LrSchedule, RmsProp, RmsPropConfig};
pub use train::{train_reward_net, RewardTrainConfig};
