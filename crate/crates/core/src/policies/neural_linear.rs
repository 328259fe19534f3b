use super::{LinearTs, RewardNetConfig};
use crate::bayes_linear::NigPriorSpec;
use crate::error::Result;
use crate::neural::{train_reward_net, Mlp, MlpSpec, RmsProp};
use crate::policy::{check_batch, LearningPolicy, Policy};
use crate::rng::Rng;
use crate::types::{ActionId, InteractionRecord};

/// Linear-TS over the last hidden layer of a shared reward network.
///
/// The network is trained on the full history; the per-action NIG heads are
/// then refit from scratch on features recomputed under the new weights.
#[derive(Debug, Clone)]
pub struct NeuralLinearTs {
    net: Mlp,
    opt: RmsProp,
    config: RewardNetConfig,
    prior: NigPriorSpec,
    heads: LinearTs,
    history: Vec<InteractionRecord>,
}

impl NeuralLinearTs {
    pub fn new(
        dim: usize,
        n_actions: usize,
        config: RewardNetConfig,
        prior: NigPriorSpec,
        rng: &mut Rng,
    ) -> Result<Self> {
        let net = Mlp::new(MlpSpec::reward_net(dim, &config.hidden, n_actions), rng)?;
        Self::from_net(net, config, prior)
    }

    pub fn from_net(net: Mlp, config: RewardNetConfig, prior: NigPriorSpec) -> Result<Self> {
        let heads = LinearTs::new(net.feature_dim(), net.output_dim(), &prior)?;
        let opt = RmsProp::new(net.n_params(), config.optimizer);
        Ok(NeuralLinearTs {
            net,
            opt,
            config,
            prior,
            heads,
            history: Vec::new(),
        })
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    pub fn heads(&self) -> &LinearTs {
        &self.heads
    }

    fn refit_heads(&mut self) -> Result<()> {
        let mut heads = LinearTs::new(self.net.feature_dim(), self.net.output_dim(), &self.prior)?;
        for rec in &self.history {
            let phi = self.net.features(&rec.context)?;
            heads.observe(&phi, rec.action, rec.reward.0);
        }
        heads.refit()?;
        self.heads = heads;
        Ok(())
    }
}

impl Policy for NeuralLinearTs {
    fn name(&self) -> &str {
        "NeuralLinear-TS"
    }

    fn n_actions(&self) -> usize {
        self.net.output_dim()
    }

    fn context_dim(&self) -> usize {
        self.net.input_dim()
    }

    fn act(&self, context: &[f64], rng: &mut Rng) -> Result<ActionId> {
        let phi = self.net.features(context)?;
        self.heads.act(&phi, rng)
    }

    fn sample_counts(&self, context: &[f64], n: usize, rng: &mut Rng) -> Result<Vec<u32>> {
        let phi = self.net.features(context)?;
        self.heads.sample_counts(&phi, n, rng)
    }
}

impl LearningPolicy for NeuralLinearTs {
    fn update(&mut self, batch: &[InteractionRecord], rng: &mut Rng) -> Result<()> {
        check_batch(self.context_dim(), self.n_actions(), batch)?;
        self.history.extend_from_slice(batch);
        if !self.history.is_empty() && self.config.train.n_steps > 0 {
            train_reward_net(
                &mut self.net,
                &mut self.opt,
                &self.history,
                None,
                &self.config.train,
                rng,
            )?;
        }
        self.refit_heads()
    }
}
