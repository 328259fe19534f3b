use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::neural::{Activation, LrSchedule, Mlp, MlpSpec, OutputHead, RmsProp, RmsPropConfig};
use crate::policy::Policy;
use crate::rng::Rng;
use crate::types::{sample_categorical, ActionDistribution, ActionId};

/// Explicit policy `π^m(·|s)`: tanh hidden layers and a softmax head.
///
/// Acting is a single forward pass and one categorical draw. The optimizer
/// state travels with the network so distillation can warm-start across
/// update periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImitationPolicy {
    net: Mlp,
    opt: RmsProp,
}

impl ImitationPolicy {
    pub fn new(dim: usize, n_actions: usize, hidden: &[usize], rng: &mut Rng) -> Result<Self> {
        Self::from_net(Mlp::new(MlpSpec::policy_net(dim, hidden, n_actions), rng)?)
    }

    /// Uses the imitation-network schedule; replace it with
    /// [`ImitationPolicy::set_schedule`].
    pub fn from_net(net: Mlp) -> Result<Self> {
        let spec = net.spec();
        if spec.output_head != OutputHead::Softmax || spec.activation != Activation::Tanh {
            return Err(Error::Invalid("imitation nets use tanh layers and a softmax head".into()));
        }
        let opt = RmsProp::new(net.n_params(), RmsPropConfig::with_schedule(LrSchedule::IMITATION_NET));
        Ok(ImitationPolicy { net, opt })
    }

    pub fn set_schedule(&mut self, config: RmsPropConfig) {
        self.opt = RmsProp::new(self.net.n_params(), config);
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    pub fn optimizer(&self) -> &RmsProp {
        &self.opt
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Mlp, &mut RmsProp) {
        (&mut self.net, &mut self.opt)
    }

    pub fn probs(&self, context: &[f64]) -> Result<Vec<f64>> {
        self.net.forward(context)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(f, self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        let p: ImitationPolicy = serde_json::from_reader(f)?;
        check_dim(p.net.n_params(), p.opt.accumulators().len())?;
        Ok(p)
    }
}

impl Policy for ImitationPolicy {
    fn name(&self) -> &str {
        "Imitation"
    }

    fn n_actions(&self) -> usize {
        self.net.output_dim()
    }

    fn context_dim(&self) -> usize {
        self.net.input_dim()
    }

    fn act(&self, context: &[f64], rng: &mut Rng) -> Result<ActionId> {
        Ok(sample_categorical(&self.net.forward(context)?, rng))
    }

    fn exact_distribution(&self, context: &[f64]) -> Option<Result<ActionDistribution>> {
        Some(self.net.forward(context).and_then(ActionDistribution::new))
    }
}
