use crate::bayes_linear::{NigModel, NigPriorSpec};
use crate::error::{check_dim, Error, Result};
use crate::policy::{check_batch, LearningPolicy, Policy};
use crate::rng::Rng;
use crate::types::{argmax, ActionId, InteractionRecord};

/// Thompson sampling with one disjoint NIG linear model per action.
#[derive(Debug, Clone)]
pub struct LinearTs {
    models: Vec<NigModel>,
    dim: usize,
}

impl LinearTs {
    pub fn new(dim: usize, n_actions: usize, prior: &NigPriorSpec) -> Result<Self> {
        if n_actions == 0 {
            return Err(Error::Invalid("need at least one action".into()));
        }
        let model = NigModel::new(dim, prior)?;
        Ok(LinearTs {
            models: vec![model; n_actions],
            dim,
        })
    }

    /// Builds the policy from already-fitted per-action models.
    pub fn from_models(models: Vec<NigModel>) -> Result<Self> {
        let dim = models
            .first()
            .ok_or_else(|| Error::Invalid("need at least one action".into()))?
            .context_dim();
        for m in &models {
            check_dim(dim, m.context_dim())?;
        }
        Ok(LinearTs { models, dim })
    }

    pub fn models(&self) -> &[NigModel] {
        &self.models
    }

    /// One posterior score draw per action.
    pub fn sample_scores(&self, context: &[f64], rng: &mut Rng) -> Vec<f64> {
        self.models.iter().map(|m| m.sample_score(context, rng)).collect()
    }

    pub(crate) fn observe(&mut self, context: &[f64], action: ActionId, reward: f64) {
        self.models[action.0].observe(context, reward);
    }

    pub(crate) fn refit(&mut self) -> Result<()> {
        self.models.iter_mut().try_for_each(NigModel::refit)
    }
}

impl Policy for LinearTs {
    fn name(&self) -> &str {
        "Linear-TS"
    }

    fn n_actions(&self) -> usize {
        self.models.len()
    }

    fn context_dim(&self) -> usize {
        self.dim
    }

    fn act(&self, context: &[f64], rng: &mut Rng) -> Result<ActionId> {
        check_dim(self.dim, context.len())?;
        if self.models.len() == 1 {
            return Ok(ActionId(0));
        }
        let mut best = ActionId(0);
        let mut best_score = f64::NEG_INFINITY;
        for (a, m) in self.models.iter().enumerate() {
            let s = m.sample_score(context, rng);
            if s > best_score {
                best_score = s;
                best = ActionId(a);
            }
        }
        if !best_score.is_finite() {
            return Err(Error::Numerical("non-finite posterior score".into()));
        }
        Ok(best)
    }

    /// Samples each action's scalar score `θ_aᵀ[x; 1]` directly from its
    /// exact marginal instead of drawing the full `θ_a`.
    fn sample_counts(&self, context: &[f64], n: usize, rng: &mut Rng) -> Result<Vec<u32>> {
        check_dim(self.dim, context.len())?;
        let mut counts = vec![0u32; self.models.len()];
        if self.models.len() == 1 {
            counts[0] = n as u32;
            return Ok(counts);
        }
        let samplers: Vec<_> = self.models.iter().map(|m| m.score_sampler(context)).collect();
        let mut scores = vec![0.0; samplers.len()];
        for _ in 0..n {
            for (s, sampler) in scores.iter_mut().zip(&samplers) {
                *s = sampler.sample(rng);
            }
            counts[argmax(&scores).0] += 1;
        }
        Ok(counts)
    }
}

impl LearningPolicy for LinearTs {
    fn update(&mut self, batch: &[InteractionRecord], _rng: &mut Rng) -> Result<()> {
        check_batch(self.dim, self.models.len(), batch)?;
        if batch.is_empty() {
            return Ok(());
        }
        for rec in batch {
            self.observe(&rec.context, rec.action, rec.reward.0);
        }
        self.refit()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes_linear::{NigParams, SufficientStats};
    use crate::linalg::Matrix;
    use crate::rng::RngSeed;
    use crate::types::{ContextVector, Reward};

    fn point_mass(mean: f64) -> NigModel {
        // intercept-only mean with negligible posterior spread
        NigModel::from_prior(NigParams {
            mu: vec![0.0, mean],
            lambda: Matrix::scaled_identity(2, 1e12),
            alpha: 1e6,
            beta: 1e-6,
        })
        .unwrap()
    }

    #[test]
    fn single_action_always_zero() {
        let p = LinearTs::new(3, 1, &NigPriorSpec::LINEAR_TS).unwrap();
        let mut rng = RngSeed(0).rng();
        for _ in 0..20 {
            assert_eq!(p.act(&[0.1, 0.2, 0.3], &mut rng).unwrap(), ActionId(0));
        }
    }

    #[test]
    fn degenerate_posteriors_pick_the_better_arm() {
        let p = LinearTs::from_models(vec![point_mass(1.0), point_mass(0.0)]).unwrap();
        let mut rng = RngSeed(1).rng();
        for _ in 0..200 {
            assert_eq!(p.act(&[0.5], &mut rng).unwrap(), ActionId(0));
        }
        let d = p.distribution(&[0.5], 2048, &mut rng).unwrap();
        assert_eq!(d.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn empty_batch_leaves_state_unchanged() {
        let mut p = LinearTs::new(2, 3, &NigPriorSpec::LINEAR_TS).unwrap();
        let before: Vec<_> = p.models().iter().map(|m| m.posterior().clone()).collect();
        p.update(&[], &mut RngSeed(0).rng()).unwrap();
        let after: Vec<_> = p.models().iter().map(|m| m.posterior().clone()).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn one_record_matches_conjugate_update() {
        let mut p = LinearTs::new(2, 2, &NigPriorSpec::LINEAR_TS).unwrap();
        let rec = InteractionRecord {
            context: ContextVector::new(vec![0.3, -0.4]).unwrap(),
            action: ActionId(1),
            reward: Reward(1.5),
            step: 0,
        };
        p.update(std::slice::from_ref(&rec), &mut RngSeed(0).rng()).unwrap();
        let prior = NigPriorSpec::LINEAR_TS.params(3).unwrap();
        let stats = SufficientStats::from_rows(3, [(&[0.3, -0.4, 1.0][..], 1.5)]);
        let want = crate::bayes_linear::nig_update(&prior, &stats).unwrap();
        assert_eq!(p.models()[1].posterior(), &want);
        assert_eq!(p.models()[0].posterior(), &prior);
    }

    #[test]
    fn bad_records_are_rejected() {
        let mut p = LinearTs::new(2, 2, &NigPriorSpec::LINEAR_TS).unwrap();
        let rec = InteractionRecord {
            context: ContextVector::new(vec![0.3]).unwrap(),
            action: ActionId(0),
            reward: Reward(1.0),
            step: 0,
        };
        assert!(matches!(
            p.update(&[rec], &mut RngSeed(0).rng()),
            Err(Error::Dimension { .. })
        ));
    }
}
