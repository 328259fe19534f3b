use ndarray::Array2;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Mlp, OutputHead, RmsProp};
use crate::error::{check_dim, Error, Result};
use crate::rng::Rng;
use crate::types::InteractionRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardTrainConfig {
    /// Minibatch updates per update period.
    pub n_steps: usize,
    /// Minibatch size; examples drawn uniformly with replacement.
    pub batch_size: usize,
}

impl Default for RewardTrainConfig {
    fn default() -> Self {
        RewardTrainConfig {
            n_steps: 100,
            batch_size: 64,
        }
    }
}

/// One update period of masked MSE regression on a multi-output reward net.
///
/// Only the output of the action actually taken contributes to the loss.
/// `weights`, when given, scales each record's loss (bootstrap weights).
/// The optimizer's learning-rate schedule restarts at every call.
pub fn train_reward_net(
    net: &mut Mlp,
    opt: &mut RmsProp,
    records: &[InteractionRecord],
    weights: Option<&[f64]>,
    config: &RewardTrainConfig,
    rng: &mut Rng,
) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Invalid("reward net training needs at least one record".into()));
    }
    if net.spec().output_head != OutputHead::Linear {
        return Err(Error::Invalid("reward nets use a linear output head".into()));
    }
    if let Some(w) = weights {
        check_dim(records.len(), w.len())?;
    }
    let d = net.input_dim();
    let k = net.output_dim();
    crate::policy::check_batch(d, k, records)?;
    opt.reset_schedule();
    let b = config.batch_size.max(1);
    let mut x = Array2::<f64>::zeros((b, d));
    let mut grad = vec![0.0; net.n_params()];
    for _ in 0..config.n_steps {
        let idx: Vec<usize> = (0..b).map(|_| rng.random_range(0..records.len())).collect();
        for (row, &i) in idx.iter().enumerate() {
            x.row_mut(row)
                .as_slice_mut()
                .expect("contiguous")
                .copy_from_slice(records[i].context.as_slice());
        }
        let trace = net.forward_batch(x.view())?;
        let mut dl = Array2::<f64>::zeros((b, k));
        for (row, &i) in idx.iter().enumerate() {
            let a = records[i].action.0;
            let w = weights.map_or(1.0, |w| w[i]);
            let err = trace.logits()[[row, a]] - records[i].reward.0;
            dl[[row, a]] = 2.0 * w * err / b as f64;
        }
        grad.iter_mut().for_each(|g| *g = 0.0);
        net.backward_batch(&trace, dl, &mut grad);
        opt.step(net.params_mut(), &grad);
    }
    Ok(())
}
