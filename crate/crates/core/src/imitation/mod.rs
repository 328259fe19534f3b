//! Distilling a Thompson-sampling policy into an explicit softmax policy
//! network.
//!
//! The offline phase simulates the sampling policy at a batch of contexts
//! ([`simulate_propensities`]) and fits a [`ImitationPolicy`] to the
//! resulting action histograms, either by cross-entropy ([`distill_kl`]) or
//! by the Kantorovich-dual policy gradient of the 1-Wasserstein distance
//! ([`distill_wasserstein`]).

mod distill;
mod propensity;
mod student;
mod transport;

pub use distill::{
    distill, distill_kl, distill_wasserstein, mean_divergence, wasserstein_logit_gradient,
    wasserstein_policy_gradient, DistillConfig, DistillReport, GradientMode, MetricKind, Objective, TableDivergence,
};
pub use propensity::{simulate_propensities, PropensityTable};
pub use student::ImitationPolicy;
pub use transport::{
    solve_kantorovich_dual, solve_transport, ActionMetric, DualPotential, TransportSolution,
};
