//! The agent of the batched loop: a base policy that learns offline, and
//! optionally an imitation network that is deployed in its place.

use rand::Rng as _;

use super::config::{ImitationConfig, PolicySpec};
use super::metrics::PeriodMetrics;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::imitation::{distill, simulate_propensities, ImitationPolicy, Objective};
use crate::policies::{BootstrapTs, LinearTs, NeuralGreedy, NeuralLinearTs};
use crate::policy::{LearningPolicy, Policy, UniformRandom};
use crate::rng::{Rng, RngSeed, Stream};
use crate::types::{ActionId, ContextVector, InteractionRecord};

pub fn build_policy(spec: &PolicySpec, dim: usize, k: usize, rng: &mut Rng) -> Result<Option<Box<dyn LearningPolicy>>> {
    Ok(Some(match spec {
        PolicySpec::Oracle => return Ok(None),
        PolicySpec::Uniform => Box::new(UniformRandom::new(k, dim)),
        PolicySpec::LinearTs { prior } => Box::new(LinearTs::new(dim, k, prior)?),
        PolicySpec::NeuralLinearTs { reward_net, prior } => {
            Box::new(NeuralLinearTs::new(dim, k, reward_net.clone(), *prior, rng)?)
        }
        PolicySpec::BootstrapTs {
            reward_net,
            n_replicates,
            weighting,
        } => Box::new(BootstrapTs::new(dim, k, *n_replicates, reward_net.clone(), *weighting, rng)?),
        PolicySpec::NeuralGreedy { reward_net } => Box::new(NeuralGreedy::new(dim, k, reward_net.clone(), rng)?),
    }))
}

pub struct Agent {
    base: Option<Box<dyn LearningPolicy>>,
    imitation: Option<(ImitationPolicy, ImitationConfig)>,
    n_actions: usize,
    updated: bool,
    observed: Vec<ContextVector>,
    periods: usize,
    seed: RngSeed,
    exec: Exec,
}

impl Agent {
    pub fn new(
        spec: &PolicySpec,
        imitation: Option<&ImitationConfig>,
        dim: usize,
        n_actions: usize,
        seed: RngSeed,
        exec: Exec,
    ) -> Result<Self> {
        let base = build_policy(spec, dim, n_actions, &mut seed.derive(Stream::Policy).derive_index(0).rng())?;
        let imitation = match imitation {
            Some(cfg) => {
                if base.is_none() {
                    return Err(Error::Config("the oracle cannot be distilled".into()));
                }
                let mut p = ImitationPolicy::new(dim, n_actions, &cfg.hidden, &mut seed.derive(Stream::Imitation).derive_index(0).rng())?;
                p.set_schedule(cfg.optimizer);
                Some((p, cfg.clone()))
            }
            None => None,
        };
        Ok(Agent {
            base,
            imitation,
            n_actions,
            updated: false,
            observed: Vec::new(),
            periods: 0,
            seed,
            exec,
        })
    }

    pub fn is_oracle(&self) -> bool {
        self.base.is_none()
    }

    pub fn base(&self) -> Option<&dyn LearningPolicy> {
        self.base.as_deref()
    }

    pub fn imitation(&self) -> Option<&ImitationPolicy> {
        self.imitation.as_ref().map(|(p, _)| p)
    }

    /// The policy that acts online. It is a plain [`Policy`], so the online
    /// path cannot reach posterior updates or training.
    pub fn deployed(&self) -> Option<&dyn Policy> {
        match (&self.imitation, &self.base) {
            (Some((p, _)), _) => Some(p),
            (None, Some(b)) => Some(b.as_ref() as &dyn Policy),
            (None, None) => None,
        }
    }

    fn uniform_phase(&self) -> bool {
        !self.updated && self.base.as_ref().is_some_and(|b| b.uniform_until_first_update())
    }

    /// One online decision. `optimal` is required for the oracle.
    pub fn act(
        &self,
        context: &[f64],
        optimal: Option<ActionId>,
        deployed_rng: &mut Rng,
        warmup_rng: &mut Rng,
    ) -> Result<ActionId> {
        if self.uniform_phase() {
            return Ok(ActionId(warmup_rng.random_range(0..self.n_actions)));
        }
        match self.deployed() {
            Some(p) => p.act(context, deployed_rng),
            None => optimal.ok_or_else(|| Error::Config("the oracle needs known mean rewards".into())),
        }
    }

    /// The offline phase closing a period: update the base policy on the
    /// period's records, then (when wrapped) simulate its propensities on the
    /// distillation contexts and distil. `fresh` replaces the observed
    /// contexts when given.
    pub fn offline_phase(
        &mut self,
        batch: &[InteractionRecord],
        fresh: Option<Vec<ContextVector>>,
        policy_rng: &mut Rng,
        imitation_rng: &mut Rng,
    ) -> Result<PeriodMetrics> {
        let started = std::time::Instant::now();
        self.periods += 1;
        let mut m = PeriodMetrics::new(self.periods);
        let Some(base) = self.base.as_mut() else {
            return Ok(m);
        };
        base.update(batch, policy_rng)?;
        self.updated = true;
        self.observed.extend(batch.iter().map(|r| r.context.clone()));
        if let Some((student, cfg)) = self.imitation.as_mut() {
            let contexts = fresh.as_deref().unwrap_or(&self.observed);
            if contexts.is_empty() {
                m.distilled = false;
            } else {
                let seed = self.seed.derive(Stream::Propensity).derive_index(self.periods as u64);
                let table = simulate_propensities(base.as_ref(), contexts, cfg.n_a, seed, self.exec)?;
                let report = distill(&table, student, &cfg.distill, imitation_rng)?;
                m.distilled = true;
                m.table_rows = table.len();
                m.kl_before = Some(report.before.kl);
                m.kl_after = Some(report.after.kl);
                m.tv_after = Some(report.after.tv);
                if report.objective == Objective::Wasserstein {
                    m.w1_before = report.before.w1;
                    m.w1_after = report.after.w1;
                }
                m.pinsker_violations = report.before.pinsker_violations + report.after.pinsker_violations;
                m.final_loss = report.loss_trace.last().copied();
            }
        }
        m.update_seconds = started.elapsed().as_secs_f64();
        Ok(m)
    }
}
