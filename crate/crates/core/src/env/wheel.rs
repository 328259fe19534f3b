use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Environment, RewardNoise, Round};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::types::ContextVector;

/// The Wheel bandit: contexts uniform on the unit disk, five arms. Arm 0
/// pays `mean_hub` everywhere; outside radius `delta` one quadrant-selected
/// arm pays `mean_spike`; all other arms pay `mean_inner`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WheelConfig {
    pub delta: f64,
    pub sigma: f64,
    pub mean_hub: f64,
    pub mean_inner: f64,
    pub mean_spike: f64,
}

impl Default for WheelConfig {
    fn default() -> Self {
        WheelConfig {
            delta: 0.95,
            sigma: 0.01,
            mean_hub: 1.2,
            mean_inner: 1.0,
            mean_spike: 50.0,
        }
    }
}

pub const WHEEL_ACTIONS: usize = 5;

impl WheelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("wheel delta must be in (0, 1), got {}", self.delta)));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::Config(format!("wheel sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }

    /// Mean reward of every arm at `s`.
    pub fn means(&self, s: [f64; 2]) -> [f64; WHEEL_ACTIONS] {
        let mut m = [self.mean_inner; WHEEL_ACTIONS];
        m[0] = self.mean_hub;
        if s[0].hypot(s[1]) > self.delta {
            m[spike_arm(s)] = self.mean_spike;
        }
        m
    }
}

/// Quadrant → arm: (+,+) → 1, (−,+) → 2, (−,−) → 3, (+,−) → 4. A zero
/// coordinate counts as positive.
pub fn spike_arm(s: [f64; 2]) -> usize {
    match (s[0] >= 0.0, s[1] >= 0.0) {
        (true, true) => 1,
        (false, true) => 2,
        (false, false) => 3,
        (true, false) => 4,
    }
}

/// Draws a context uniformly from the unit disk (rejection from the square)
/// and returns it with the arm means.
pub fn wheel_sample(config: &WheelConfig, rng: &mut Rng) -> ([f64; 2], [f64; WHEEL_ACTIONS]) {
    loop {
        let x = rng.random_range(-1.0..1.0f64);
        let y = rng.random_range(-1.0..1.0f64);
        if x * x + y * y <= 1.0 {
            return ([x, y], config.means([x, y]));
        }
    }
}

#[derive(Debug, Clone)]
pub struct WheelBandit {
    config: WheelConfig,
}

impl WheelBandit {
    pub fn new(config: WheelConfig) -> Result<Self> {
        config.validate()?;
        Ok(WheelBandit { config })
    }

    pub fn config(&self) -> &WheelConfig {
        &self.config
    }
}

impl Environment for WheelBandit {
    fn name(&self) -> &str {
        "wheel"
    }

    fn n_actions(&self) -> usize {
        WHEEL_ACTIONS
    }

    fn context_dim(&self) -> usize {
        2
    }

    fn next_round(&mut self, rng: &mut Rng) -> Result<Round> {
        let (s, means) = wheel_sample(&self.config, rng);
        Ok(Round {
            context: ContextVector::new(s.to_vec())?,
            mean_rewards: means.to_vec(),
            noise: RewardNoise::Gaussian { sigma: self.config.sigma },
        })
    }
}
