use rand::Rng as _;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::RewardNetConfig;
use crate::error::{Error, Result};
use crate::neural::{train_reward_net, Mlp, MlpSpec, RmsProp};
use crate::policy::{check_batch, LearningPolicy, Policy};
use crate::rng::Rng;
use crate::types::{argmax, ActionDistribution, ActionId, InteractionRecord};

/// How each replicate reweights the shared history at an update period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BootstrapWeighting {
    /// Independent Poisson(1) weight per example (online bootstrap).
    #[default]
    Poisson,
    /// Multinomial counts from `n` uniform draws with replacement.
    Resample,
}

impl BootstrapWeighting {
    pub fn draw(self, n: usize, rng: &mut Rng) -> Vec<f64> {
        match self {
            BootstrapWeighting::Poisson => {
                let p = Poisson::new(1.0).expect("positive rate");
                (0..n).map(|_| p.sample(rng)).collect()
            }
            BootstrapWeighting::Resample => {
                let mut w = vec![0.0; n];
                for _ in 0..n {
                    w[rng.random_range(0..n)] += 1.0;
                }
                w
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Replicate {
    net: Mlp,
    opt: RmsProp,
}

/// Bootstrap-NN-TS: `B` reward networks trained on reweighted histories; each
/// decision acts greedily under one uniformly chosen replicate.
#[derive(Debug, Clone)]
pub struct BootstrapTs {
    replicates: Vec<Replicate>,
    config: RewardNetConfig,
    weighting: BootstrapWeighting,
    history: Vec<InteractionRecord>,
    weights: Vec<Vec<f64>>,
}

impl BootstrapTs {
    pub fn new(
        dim: usize,
        n_actions: usize,
        n_replicates: usize,
        config: RewardNetConfig,
        weighting: BootstrapWeighting,
        rng: &mut Rng,
    ) -> Result<Self> {
        let nets = (0..n_replicates)
            .map(|_| Mlp::new(MlpSpec::reward_net(dim, &config.hidden, n_actions), rng))
            .collect::<Result<Vec<_>>>()?;
        Self::from_nets(nets, config, weighting)
    }

    pub fn from_nets(nets: Vec<Mlp>, config: RewardNetConfig, weighting: BootstrapWeighting) -> Result<Self> {
        if nets.is_empty() {
            return Err(Error::Invalid("bootstrap needs at least one replicate".into()));
        }
        let replicates = nets
            .into_iter()
            .map(|net| Replicate {
                opt: RmsProp::new(net.n_params(), config.optimizer),
                net,
            })
            .collect();
        Ok(BootstrapTs {
            replicates,
            config,
            weighting,
            history: Vec::new(),
            weights: Vec::new(),
        })
    }

    pub fn n_replicates(&self) -> usize {
        self.replicates.len()
    }

    pub fn replicate(&self, b: usize) -> &Mlp {
        &self.replicates[b].net
    }

    /// Example weights used by each replicate at the last update.
    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn pick_replicate(&self, rng: &mut Rng) -> usize {
        rng.random_range(0..self.replicates.len())
    }
}

impl Policy for BootstrapTs {
    fn name(&self) -> &str {
        "Bootstrap-NN-TS"
    }

    fn n_actions(&self) -> usize {
        self.replicates[0].net.output_dim()
    }

    fn context_dim(&self) -> usize {
        self.replicates[0].net.input_dim()
    }

    fn act(&self, context: &[f64], rng: &mut Rng) -> Result<ActionId> {
        let b = self.pick_replicate(rng);
        Ok(argmax(&self.replicates[b].net.forward(context)?))
    }

    /// Mixture of the replicates' greedy one-hot choices.
    fn exact_distribution(&self, context: &[f64]) -> Option<Result<ActionDistribution>> {
        let mut probs = vec![0.0; self.n_actions()];
        let w = 1.0 / self.replicates.len() as f64;
        for r in &self.replicates {
            match r.net.forward(context) {
                Ok(out) => probs[argmax(&out).0] += w,
                Err(e) => return Some(Err(e)),
            }
        }
        Some(ActionDistribution::from_weights(&probs))
    }
}

impl LearningPolicy for BootstrapTs {
    fn update(&mut self, batch: &[InteractionRecord], rng: &mut Rng) -> Result<()> {
        check_batch(self.context_dim(), self.n_actions(), batch)?;
        if batch.is_empty() {
            return Ok(());
        }
        self.history.extend_from_slice(batch);
        let n = self.history.len();
        self.weights.clear();
        for rep in &mut self.replicates {
            let w = self.weighting.draw(n, rng);
            train_reward_net(&mut rep.net, &mut rep.opt, &self.history, Some(&w), &self.config.train, rng)?;
            self.weights.push(w);
        }
        Ok(())
    }
}
