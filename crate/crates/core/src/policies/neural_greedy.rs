use super::RewardNetConfig;
use crate::error::{check_dim, Result};
use crate::neural::{train_reward_net, Mlp, MlpSpec, RmsProp};
use crate::policy::{check_batch, LearningPolicy, Policy};
use crate::rng::Rng;
use crate::types::{argmax, ActionDistribution, ActionId, InteractionRecord};

/// Deterministic argmax of a multi-output reward network.
#[derive(Debug, Clone)]
pub struct NeuralGreedy {
    net: Mlp,
    opt: RmsProp,
    config: RewardNetConfig,
    history: Vec<InteractionRecord>,
}

impl NeuralGreedy {
    pub fn new(dim: usize, n_actions: usize, config: RewardNetConfig, rng: &mut Rng) -> Result<Self> {
        let net = Mlp::new(MlpSpec::reward_net(dim, &config.hidden, n_actions), rng)?;
        Ok(Self::from_net(net, config))
    }

    pub fn from_net(net: Mlp, config: RewardNetConfig) -> Self {
        let opt = RmsProp::new(net.n_params(), config.optimizer);
        NeuralGreedy {
            net,
            opt,
            config,
            history: Vec::new(),
        }
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    pub fn history(&self) -> &[InteractionRecord] {
        &self.history
    }
}

impl Policy for NeuralGreedy {
    fn name(&self) -> &str {
        "Neural-Greedy"
    }

    fn n_actions(&self) -> usize {
        self.net.output_dim()
    }

    fn context_dim(&self) -> usize {
        self.net.input_dim()
    }

    fn act(&self, context: &[f64], _rng: &mut Rng) -> Result<ActionId> {
        Ok(argmax(&self.net.forward(context)?))
    }

    fn exact_distribution(&self, context: &[f64]) -> Option<Result<ActionDistribution>> {
        Some(
            self.net
                .forward(context)
                .map(|out| ActionDistribution::one_hot(out.len(), argmax(&out))),
        )
    }
}

impl LearningPolicy for NeuralGreedy {
    fn update(&mut self, batch: &[InteractionRecord], rng: &mut Rng) -> Result<()> {
        check_batch(self.context_dim(), self.n_actions(), batch)?;
        if batch.is_empty() {
            return Ok(());
        }
        self.history.extend_from_slice(batch);
        check_dim(self.net.input_dim(), self.history[0].context.dim())?;
        train_reward_net(
            &mut self.net,
            &mut self.opt,
            &self.history,
            None,
            &self.config.train,
            rng,
        )
    }
}
