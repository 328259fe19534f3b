//! Deterministic randomness.
//!
//! Every trial owns one root seed. Components (environment, policy,
//! imitation trainer, per-row propensity streams) get their own generator
//! from a fixed sub-seed derivation, so adding draws in one component never
//! perturbs another.

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

/// The generator used everywhere in the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

/// Named sub-streams of a trial seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Environment = 1,
    Policy = 2,
    Imitation = 3,
    Propensity = 4,
    Deployed = 5,
    Warmup = 6,
    Replay = 7,
    Data = 8,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngSeed {
    pub fn derive(self, stream: Stream) -> RngSeed {
        self.derive_index(stream as u64)
    }

    pub fn derive_index(self, index: u64) -> RngSeed {
        RngSeed(splitmix64(splitmix64(self.0) ^ splitmix64(index.wrapping_add(0x5851_F42D))))
    }

    pub fn rng(self) -> Rng {
        Rng::seed_from_u64(self.0)
    }

    pub fn stream(self, stream: Stream) -> Rng {
        self.derive(stream).rng()
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}
