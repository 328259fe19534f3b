//! Thompson sampling for contextual bandits, and its distillation into
//! explicit policy networks.
//!
//! The crate is organised around a small policy interface ([`policy::Policy`]
//! for acting, [`policy::LearningPolicy`] for batch updates) and a set of
//! building blocks:
//!
//! - [`bayes_linear`]: conjugate normal-inverse-gamma regression with
//!   Cholesky-cached posterior sampling.
//! - [`neural`]: dense networks with hand-written backpropagation and RMSProp.
//! - [`policies`]: Linear-TS, NeuralLinear-TS, Bootstrap-NN-TS, Neural-Greedy.
//! - [`imitation`]: Monte-Carlo propensity tables, KL and Wasserstein
//!   distillation into a softmax policy network.
//! - [`divergences`]: KL, total variation and the Pinsker check.
//! - [`env`]: Wheel, supervised-dataset bandits and logged-data replay.
//! - [`harness`]: batched experiment loop, regret aggregation, latency bench.

pub mod bayes_linear;
pub mod divergences;
pub mod env;
pub mod error;
pub mod exec;
pub mod harness;
pub mod imitation;
pub mod linalg;
pub mod neural;
pub mod policies;
pub mod policy;
pub mod rng;
pub mod types;

pub use error::{Error, Result};
pub use policy::{LearningPolicy, Policy, UniformRandom};
pub use rng::{Rng, RngSeed};
pub use types::{ActionDistribution, ActionId, ContextVector, InteractionRecord, Reward};
