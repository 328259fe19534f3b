//! The policy interface shared by every agent in the crate.
//!
//! Acting and learning are separate traits: the online decision path only
//! ever holds a `&dyn Policy`, which has no way to trigger posterior updates
//! or network training.

use rand::Rng as _;

use crate::error::{check_dim, Error, Result};
use crate::rng::Rng;
use crate::types::{sample_categorical, ActionDistribution, ActionId, InteractionRecord};

pub trait Policy: Send + Sync {
    fn name(&self) -> &str;

    fn n_actions(&self) -> usize;

    fn context_dim(&self) -> usize;

    /// Draws one action from the policy's conditional distribution.
    fn act(&self, context: &[f64], rng: &mut Rng) -> Result<ActionId>;

    /// The conditional distribution in closed form, when the policy has one.
    fn exact_distribution(&self, _context: &[f64]) -> Option<Result<ActionDistribution>> {
        None
    }

    /// Histogram of `n` independent draws at `context`.
    ///
    /// Implementations may override this with any sampler that has the same
    /// per-draw distribution as [`Policy::act`].
    fn sample_counts(&self, context: &[f64], n: usize, rng: &mut Rng) -> Result<Vec<u32>> {
        let mut counts = vec![0u32; self.n_actions()];
        for _ in 0..n {
            counts[self.act(context, rng)?.0] += 1;
        }
        Ok(counts)
    }

    /// Exact distribution if available, otherwise the Monte-Carlo estimate
    /// `probs[a] = #{j : A_j = a} / n_samples`.
    fn distribution(
        &self,
        context: &[f64],
        n_samples: usize,
        rng: &mut Rng,
    ) -> Result<ActionDistribution> {
        check_dim(self.context_dim(), context.len())?;
        if n_samples == 0 {
            return Err(Error::Invalid("n_samples must be at least 1".into()));
        }
        if let Some(exact) = self.exact_distribution(context) {
            return exact;
        }
        let counts = self.sample_counts(context, n_samples, rng)?;
        ActionDistribution::from_counts(&counts)
    }
}

pub trait LearningPolicy: Policy {
    /// Folds a batch of observations into the policy state. Batches are
    /// consumed once: applying the same batch twice counts it twice.
    fn update(&mut self, batch: &[InteractionRecord], rng: &mut Rng) -> Result<()>;

    /// Whether the harness should act uniformly at random until the first
    /// batch update.
    fn uniform_until_first_update(&self) -> bool {
        true
    }
}

pub(crate) fn check_batch(dim: usize, n_actions: usize, batch: &[InteractionRecord]) -> Result<()> {
    for rec in batch {
        check_dim(dim, rec.context.dim())?;
        if rec.action.0 >= n_actions {
            return Err(Error::Dimension {
                expected: n_actions,
                got: rec.action.0,
            });
        }
    }
    Ok(())
}

/// Uniform over `k` actions regardless of context.
#[derive(Debug, Clone)]
pub struct UniformRandom {
    n_actions: usize,
    dim: usize,
}

impl UniformRandom {
    pub fn new(n_actions: usize, dim: usize) -> Self {
        assert!(n_actions >= 1);
        UniformRandom { n_actions, dim }
    }
}

impl Policy for UniformRandom {
    fn name(&self) -> &str {
        "UniformRandom"
    }

    fn n_actions(&self) -> usize {
        self.n_actions
    }

    fn context_dim(&self) -> usize {
        self.dim
    }

    fn act(&self, context: &[f64], rng: &mut Rng) -> Result<ActionId> {
        check_dim(self.dim, context.len())?;
        Ok(ActionId(rng.random_range(0..self.n_actions)))
    }

    fn exact_distribution(&self, context: &[f64]) -> Option<Result<ActionDistribution>> {
        Some(check_dim(self.dim, context.len()).map(|_| ActionDistribution::uniform(self.n_actions)))
    }
}

impl LearningPolicy for UniformRandom {
    fn update(&mut self, batch: &[InteractionRecord], _rng: &mut Rng) -> Result<()> {
        check_batch(self.dim, self.n_actions, batch)
    }

    fn uniform_until_first_update(&self) -> bool {
        false
    }
}

/// Always plays the same action.
#[derive(Debug, Clone)]
pub struct FixedAction {
    action: ActionId,
    n_actions: usize,
    dim: usize,
}

impl FixedAction {
    pub fn new(action: ActionId, n_actions: usize, dim: usize) -> Self {
        assert!(action.0 < n_actions);
        FixedAction {
            action,
            n_actions,
            dim,
        }
    }
}

impl Policy for FixedAction {
    fn name(&self) -> &str {
        "FixedAction"
    }

    fn n_actions(&self) -> usize {
        self.n_actions
    }

    fn context_dim(&self) -> usize {
        self.dim
    }

    fn act(&self, context: &[f64], _rng: &mut Rng) -> Result<ActionId> {
        check_dim(self.dim, context.len())?;
        Ok(self.action)
    }

    fn exact_distribution(&self, context: &[f64]) -> Option<Result<ActionDistribution>> {
        Some(
            check_dim(self.dim, context.len())
                .map(|_| ActionDistribution::one_hot(self.n_actions, self.action)),
        )
    }
}

/// Softmax over linear logits `W [s; 1]`. With zero slopes this is a fixed,
/// context-independent categorical distribution.
#[derive(Debug, Clone)]
pub struct LinearSoftmax {
    /// `k x (d + 1)` row-major; the last column is the bias.
    weights: Vec<f64>,
    n_actions: usize,
    dim: usize,
}

impl LinearSoftmax {
    pub fn new(weights: Vec<f64>, n_actions: usize, dim: usize) -> Result<Self> {
        check_dim(n_actions * (dim + 1), weights.len())?;
        Ok(LinearSoftmax {
            weights,
            n_actions,
            dim,
        })
    }

    pub fn constant(logits: &[f64], dim: usize) -> Self {
        let k = logits.len();
        let mut weights = vec![0.0; k * (dim + 1)];
        for (a, &l) in logits.iter().enumerate() {
            weights[a * (dim + 1) + dim] = l;
        }
        LinearSoftmax {
            weights,
            n_actions: k,
            dim,
        }
    }

    pub fn logits(&self, context: &[f64]) -> Vec<f64> {
        let w = self.dim + 1;
        (0..self.n_actions)
            .map(|a| {
                let row = &self.weights[a * w..(a + 1) * w];
                row[..self.dim].iter().zip(context).map(|(x, y)| x * y).sum::<f64>() + row[self.dim]
            })
            .collect()
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let z: f64 = out.iter().sum();
    for p in &mut out {
        *p /= z;
    }
    out
}

impl Policy for LinearSoftmax {
    fn name(&self) -> &str {
        "LinearSoftmax"
    }

    fn n_actions(&self) -> usize {
        self.n_actions
    }

    fn context_dim(&self) -> usize {
        self.dim
    }

    fn act(&self, context: &[f64], rng: &mut Rng) -> Result<ActionId> {
        check_dim(self.dim, context.len())?;
        Ok(sample_categorical(&softmax(&self.logits(context)), rng))
    }

    fn exact_distribution(&self, context: &[f64]) -> Option<Result<ActionDistribution>> {
        Some(
            check_dim(self.dim, context.len())
                .and_then(|_| ActionDistribution::new(softmax(&self.logits(context)))),
        )
    }
}
