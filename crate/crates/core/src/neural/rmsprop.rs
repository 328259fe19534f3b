use serde::{Deserialize, Serialize};

/// Inverse-time decay: `lr(t) = lr₀ / (1 + rate · ⌊t / decay_every⌋)`.
///
/// With `decay_every = 1` the rate drops after every minibatch update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    pub initial_lr: f64,
    pub decay_rate: f64,
    pub decay_every: u64,
}

impl LrSchedule {
    /// Reward networks: 0.01, decayed by 0.55 after each minibatch.
    pub const REWARD_NET: LrSchedule = LrSchedule {
        initial_lr: 0.01,
        decay_rate: 0.55,
        decay_every: 1,
    };

    /// Imitation networks: 0.001, decayed by 0.05 every 100 minibatches.
    pub const IMITATION_NET: LrSchedule = LrSchedule {
        initial_lr: 0.001,
        decay_rate: 0.05,
        decay_every: 100,
    };

    pub fn lr(&self, step: u64) -> f64 {
        let events = step / self.decay_every.max(1);
        self.initial_lr / (1.0 + self.decay_rate * events as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmsPropConfig {
    pub schedule: LrSchedule,
    pub rho: f64,
    pub eps: f64,
}

impl RmsPropConfig {
    pub fn with_schedule(schedule: LrSchedule) -> Self {
        RmsPropConfig {
            schedule,
            rho: 0.9,
            eps: 1e-8,
        }
    }
}

/// RMSProp: `acc ← ρ acc + (1−ρ) g²`, `θ ← θ − lr(t) g / (√acc + ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmsProp {
    acc: Vec<f64>,
    config: RmsPropConfig,
    step_count: u64,
}

impl RmsProp {
    pub fn new(n_params: usize, config: RmsPropConfig) -> Self {
        RmsProp {
            acc: vec![0.0; n_params],
            config,
            step_count: 0,
        }
    }

    pub fn config(&self) -> &RmsPropConfig {
        &self.config
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn accumulators(&self) -> &[f64] {
        &self.acc
    }

    pub fn current_lr(&self) -> f64 {
        self.config.schedule.lr(self.step_count)
    }

    /// Restarts the learning-rate schedule; accumulators are kept.
    pub fn reset_schedule(&mut self) {
        self.step_count = 0;
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        assert_eq!(params.len(), self.acc.len());
        assert_eq!(grad.len(), self.acc.len());
        let RmsPropConfig { rho, eps, .. } = self.config;
        let lr = self.current_lr();
        for ((p, a), g) in params.iter_mut().zip(self.acc.iter_mut()).zip(grad) {
            *a = rho * *a + (1.0 - rho) * g * g;
            *p -= lr * g / (a.sqrt() + eps);
        }
        self.step_count += 1;
    }
}
