//! Generated stand-ins for the benchmark datasets. The schemas follow the
//! originals (22 categorical mushroom attributes, 17 warfarin covariates);
//! the label mechanisms are simple, documented choices.

use std::io::Write;
use std::path::Path;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use super::data::{RewardRule, SupervisedBanditSpec};
use super::replay::{LoggedDataset, LoggedTuple};
use super::wheel::{wheel_sample, WheelConfig, WHEEL_ACTIONS};
use super::{Environment, RewardNoise, Round};
use crate::error::Result;
use crate::rng::{Rng, RngSeed};
use crate::types::{ActionId, ContextVector};

pub const MUSHROOM_COLUMNS: [(&str, usize); 22] = [
    ("cap_shape", 6),
    ("cap_surface", 4),
    ("cap_color", 10),
    ("bruises", 2),
    ("odor", 9),
    ("gill_attachment", 2),
    ("gill_spacing", 2),
    ("gill_size", 2),
    ("gill_color", 12),
    ("stalk_shape", 2),
    ("stalk_root", 5),
    ("stalk_surface_above_ring", 4),
    ("stalk_surface_below_ring", 4),
    ("stalk_color_above_ring", 9),
    ("stalk_color_below_ring", 9),
    ("veil_type", 1),
    ("veil_color", 4),
    ("ring_number", 3),
    ("ring_type", 5),
    ("spore_print_color", 9),
    ("population", 6),
    ("habitat", 7),
];

/// Odor levels that mark a mushroom poisonous. Odor level 0 is ambiguous and
/// defers to spore-print colour level 0.
const POISON_ODORS: [usize; 5] = [1, 2, 3, 5, 8];

fn level_char(c: usize) -> char {
    (b'a' + c as u8) as char
}

/// `n` rows with a `class` column (`p`/`e`) and the 22 attribute columns.
/// The first rows cycle through every level so one-hot encoding always
/// yields 117 features.
pub fn write_mushroom_csv<W: Write>(n: usize, seed: u64, out: W) -> Result<()> {
    let mut rng = RngSeed(seed).rng();
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = std::iter::once("class").chain(MUSHROOM_COLUMNS.iter().map(|c| c.0)).collect();
    w.write_record(&header)?;
    for i in 0..n {
        let levels: Vec<usize> = MUSHROOM_COLUMNS
            .iter()
            .map(|&(_, k)| if i < 12 { i % k } else { rng.random_range(0..k) })
            .collect();
        let odor = levels[4];
        let poisonous = POISON_ODORS.contains(&odor) || (odor == 0 && levels[19] == 0);
        let mut row = vec![if poisonous { "p".to_string() } else { "e".to_string() }];
        row.extend(levels.iter().map(|&l| level_char(l).to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn mushroom_spec(csv_path: impl AsRef<Path>, shuffle_seed: u64) -> SupervisedBanditSpec {
    SupervisedBanditSpec {
        csv_path: csv_path.as_ref().to_path_buf(),
        feature_columns: None,
        categorical_columns: vec![],
        all_categorical: true,
        label_column: Some("class".into()),
        reward_rule: RewardRule::Mushroom {
            poisonous_label: "p".into(),
        },
        shuffle_seed,
    }
}

pub const WARFARIN_COLUMNS: [&str; 17] = [
    "age_decade",
    "height_cm",
    "weight_kg",
    "race_asian",
    "race_black",
    "race_unknown",
    "enzyme_inducer",
    "amiodarone",
    "cyp2c9_12",
    "cyp2c9_13",
    "cyp2c9_22",
    "cyp2c9_23",
    "cyp2c9_33",
    "vkorc1_ag",
    "vkorc1_aa",
    "vkorc1_unknown",
    "smoker",
];

/// `n` patients with 17 covariates and a `therapeutic_dose` label (mg/week)
/// from a square-root-linear pharmacogenetic dosing model plus noise.
pub fn write_warfarin_csv<W: Write>(n: usize, seed: u64, out: W) -> Result<()> {
    let mut rng = RngSeed(seed).rng();
    let noise = Normal::new(0.0, 0.35).expect("finite std");
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = WARFARIN_COLUMNS.iter().copied().chain(std::iter::once("therapeutic_dose")).collect();
    w.write_record(&header)?;
    for _ in 0..n {
        let age = rng.random_range(2..10) as f64;
        let height = 150.0 + 40.0 * rng.random::<f64>();
        let weight = 45.0 + 0.5 * (height - 150.0) + 50.0 * rng.random::<f64>();
        let race = rng.random_range(0..4); // white, asian, black, unknown
        let cyp = rng.random_range(0..12); // genotype buckets, *1/*1 most common
        let vk = rng.random_range(0..4); // GG, AG, AA, unknown
        let inducer = (rng.random::<f64>() < 0.05) as u8 as f64;
        let amio = (rng.random::<f64>() < 0.08) as u8 as f64;
        let smoker = (rng.random::<f64>() < 0.2) as u8 as f64;
        let ind = |b: bool| b as u8 as f64;
        let cyp_hot = [
            ind(cyp == 6 || cyp == 7),
            ind(cyp == 8),
            ind(cyp == 9),
            ind(cyp == 10),
            ind(cyp == 11 && rng.random::<bool>()),
        ];
        let x = [
            age,
            height,
            weight,
            ind(race == 1),
            ind(race == 2),
            ind(race == 3),
            inducer,
            amio,
            cyp_hot[0],
            cyp_hot[1],
            cyp_hot[2],
            cyp_hot[3],
            cyp_hot[4],
            ind(vk == 1),
            ind(vk == 2),
            ind(vk == 3),
            smoker,
        ];
        let sqrt_dose = 5.6044 - 0.2614 * x[0] + 0.0087 * x[1] + 0.0128 * x[2] - 0.2188 * x[3] - 0.1092 * x[4]
            - 0.2760 * x[5]
            + 1.1816 * x[6]
            - 0.5503 * x[7]
            - 0.5211 * x[8]
            - 0.9357 * x[9]
            - 1.0616 * x[10]
            - 1.9206 * x[11]
            - 2.3312 * x[12]
            - 0.8677 * x[13]
            - 1.6974 * x[14]
            - 0.4854 * x[15]
            + noise.sample(&mut rng);
        let dose = sqrt_dose.max(1.0).powi(2);
        let mut row: Vec<String> = x.iter().map(|v| format!("{v}")).collect();
        row.push(format!("{dose:.4}"));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn warfarin_spec(csv_path: impl AsRef<Path>, k_levels: usize, shuffle_seed: u64) -> SupervisedBanditSpec {
    SupervisedBanditSpec {
        csv_path: csv_path.as_ref().to_path_buf(),
        feature_columns: None,
        categorical_columns: vec![],
        all_categorical: false,
        label_column: Some("therapeutic_dose".into()),
        reward_rule: RewardRule::Dosage { k_levels },
        shuffle_seed,
    }
}

/// Synthetic video-transcoding problem: 7 quality levels ordered from
/// lowest to highest. A session succeeds with a probability that falls with
/// quality and rises with available bandwidth; success at level `a` pays
/// `(a + 1) / 7`, failure pays 0. The reward function is illustrative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VideoModel;

pub const VIDEO_ACTIONS: usize = 7;
pub const VIDEO_DIM: usize = 5;

impl VideoModel {
    /// Bandwidth, latency, device tier, time of day, content complexity.
    pub fn sample_context(&self, rng: &mut Rng) -> [f64; VIDEO_DIM] {
        std::array::from_fn(|_| rng.random::<f64>())
    }

    pub fn value(&self, a: usize) -> f64 {
        (a + 1) as f64 / VIDEO_ACTIONS as f64
    }

    pub fn success(&self, s: &[f64]) -> [f64; VIDEO_ACTIONS] {
        let capacity = 6.0 * s[0] - 2.0 * s[1] + 1.0 * s[2] - 1.5 * s[4];
        std::array::from_fn(|a| 1.0 / (1.0 + (-(capacity - 0.9 * a as f64 + 1.0)).exp()))
    }

    pub fn means(&self, s: &[f64]) -> [f64; VIDEO_ACTIONS] {
        let p = self.success(s);
        std::array::from_fn(|a| p[a] * self.value(a))
    }

    pub fn sample_reward(&self, s: &[f64], a: usize, rng: &mut Rng) -> f64 {
        if rng.random::<f64>() < self.success(s)[a] {
            self.value(a)
        } else {
            0.0
        }
    }
}

impl Environment for VideoModel {
    fn name(&self) -> &str {
        "video"
    }

    fn n_actions(&self) -> usize {
        VIDEO_ACTIONS
    }

    fn context_dim(&self) -> usize {
        VIDEO_DIM
    }

    fn next_round(&mut self, rng: &mut Rng) -> Result<Round> {
        let s = self.sample_context(rng);
        Ok(Round {
            context: ContextVector::new(s.to_vec())?,
            mean_rewards: self.means(&s).to_vec(),
            noise: RewardNoise::Bernoulli {
                success: self.success(&s).to_vec(),
            },
        })
    }
}

/// Tuples from any environment under the uniform logging policy.
pub fn log_uniform(env: &mut dyn Environment, n: usize, seed: u64) -> Result<LoggedDataset> {
    let mut rng = RngSeed(seed).rng();
    let k = env.n_actions();
    let mut tuples = Vec::with_capacity(n);
    for _ in 0..n {
        let round = env.next_round(&mut rng)?;
        let a = ActionId(rng.random_range(0..k));
        let r = round.sample_reward(a, &mut rng)?;
        tuples.push(LoggedTuple {
            context: round.context,
            action: a,
            reward: r,
        });
    }
    LoggedDataset::new(tuples, k)
}

pub fn video_logged(n: usize, seed: u64) -> Result<LoggedDataset> {
    log_uniform(&mut VideoModel, n, seed)
}

pub fn wheel_logged(config: &WheelConfig, n: usize, seed: u64) -> Result<LoggedDataset> {
    let mut rng = RngSeed(seed).rng();
    let noise = Normal::new(0.0, config.sigma).expect("positive sigma");
    let tuples = (0..n)
        .map(|_| {
            let (s, m) = wheel_sample(config, &mut rng);
            let a = rng.random_range(0..WHEEL_ACTIONS);
            Ok(LoggedTuple {
                context: ContextVector::new(s.to_vec())?,
                action: ActionId(a),
                reward: crate::types::Reward(m[a] + noise.sample(&mut rng)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LoggedDataset::new(tuples, WHEEL_ACTIONS)
}
