//! Interaction vocabulary: contexts, actions, rewards and action distributions.

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// A finite feature vector observed before each decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContextVector(Vec<f64>);

impl ContextVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("context entry {i} is not finite")));
        }
        Ok(ContextVector(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ContextVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionId(pub usize);

impl ActionId {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn checked(index: usize, n_actions: usize) -> Result<Self> {
        if index < n_actions {
            Ok(ActionId(index))
        } else {
            Err(Error::Dimension {
                expected: n_actions,
                got: index,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Reward(pub f64);

impl Reward {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Reward(value))
        } else {
            Err(Error::Invalid(format!("reward {value} is not finite")))
        }
    }
}

/// One `(context, action, reward)` observation at a given step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub context: ContextVector,
    pub action: ActionId,
    pub reward: Reward,
    pub step: u64,
}

/// Checks that steps are strictly increasing across a history.
pub fn validate_history(records: &[InteractionRecord]) -> Result<()> {
    for w in records.windows(2) {
        if w[1].step <= w[0].step {
            return Err(Error::Invalid(format!(
                "history steps not increasing: {} then {}",
                w[0].step, w[1].step
            )));
        }
    }
    Ok(())
}

/// Tolerance on the total mass of an [`ActionDistribution`].
pub const PROB_SUM_TOL: f64 = 1e-9;

/// A probability vector over the `k` actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionDistribution(Vec<f64>);

impl ActionDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Invalid("empty action distribution".into()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Invalid("negative or non-finite probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::Invalid(format!("probabilities sum to {total}")));
        }
        Ok(ActionDistribution(probs))
    }

    /// Normalises non-negative weights (counts, unnormalised masses).
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Invalid("weights must have positive finite mass".into()));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn from_counts(counts: &[u32]) -> Result<Self> {
        let n: u64 = counts.iter().map(|&c| c as u64).sum();
        if n == 0 {
            return Err(Error::Invalid("no samples".into()));
        }
        let inv = 1.0 / n as f64;
        Self::new(counts.iter().map(|&c| c as f64 * inv).collect())
    }

    pub fn uniform(k: usize) -> Self {
        ActionDistribution(vec![1.0 / k as f64; k])
    }

    pub fn one_hot(k: usize, action: ActionId) -> Self {
        let mut p = vec![0.0; k];
        p[action.0] = 1.0;
        ActionDistribution(p)
    }

    pub fn n_actions(&self) -> usize {
        self.0.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Inverse-CDF categorical draw. Falls through to the last action with
    /// positive mass when rounding leaves the uniform beyond the total.
    pub fn sample(&self, rng: &mut Rng) -> ActionId {
        sample_categorical(&self.0, rng)
    }
}

pub(crate) fn sample_categorical(probs: &[f64], rng: &mut Rng) -> ActionId {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return ActionId(i);
        }
    }
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1);
    ActionId(last)
}

/// Index of the largest value; ties resolve to the lowest index.
pub fn argmax(values: &[f64]) -> ActionId {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    ActionId(best)
}
