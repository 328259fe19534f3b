//! Supervised datasets as bandits: CSV ingestion with min-max scaling and
//! one-hot encoding, plus the reward rules that turn labels into rewards.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Environment, RewardNoise, Round};
use crate::error::{check_dim, Error, Result};
use crate::rng::{Rng, RngSeed};
use crate::types::{ActionId, ContextVector, Reward};

pub const MUSHROOM_ABSTAIN: ActionId = ActionId(0);
pub const MUSHROOM_EAT: ActionId = ActionId(1);
pub const MUSHROOM_SAFE_REWARD: f64 = 5.0;
pub const MUSHROOM_POISON_REWARD: f64 = -35.0;

/// Abstaining pays 0; eating a safe mushroom pays +5; eating a poisonous one
/// pays +5 or −35 with equal probability.
pub fn mushroom_reward(poisonous: bool, action: ActionId, rng: &mut Rng) -> Reward {
    if action == MUSHROOM_ABSTAIN {
        Reward(0.0)
    } else if !poisonous || rng.random::<bool>() {
        Reward(MUSHROOM_SAFE_REWARD)
    } else {
        Reward(MUSHROOM_POISON_REWARD)
    }
}

pub fn mushroom_means(poisonous: bool) -> [f64; 2] {
    let eat = if poisonous {
        0.5 * (MUSHROOM_SAFE_REWARD + MUSHROOM_POISON_REWARD)
    } else {
        MUSHROOM_SAFE_REWARD
    };
    [0.0, eat]
}

/// Dose of level `i` out of `k` equally spaced levels on `[lo, hi]`.
pub fn dose_level(i: usize, k: usize, lo: f64, hi: f64) -> f64 {
    lo + i as f64 * (hi - lo) / (k - 1) as f64
}

/// `1 − |dose(chosen) − optimal| / (hi − lo)`.
pub fn dosage_reward(optimal: f64, chosen: ActionId, k: usize, lo: f64, hi: f64) -> Result<Reward> {
    if k < 2 {
        return Err(Error::Invalid("dosage needs at least 2 levels".into()));
    }
    if !(lo < hi) {
        return Err(Error::Invalid(format!("dosage range [{lo}, {hi}] is empty")));
    }
    let a = ActionId::checked(chosen.0, k)?;
    Ok(Reward(1.0 - (dose_level(a.0, k, lo, hi) - optimal).abs() / (hi - lo)))
}

/// How rows of a supervised dataset become rewards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewardRule {
    /// Label column holds the class; rows equal to `poisonous_label` are
    /// poisonous. Two actions: abstain, eat.
    Mushroom {
        #[serde(default = "default_poisonous")]
        poisonous_label: String,
    },
    /// Label column holds the optimal dose; `k_levels` discretised actions.
    Dosage { k_levels: usize },
    /// One column per action holding its mean reward.
    Table { reward_columns: Vec<String> },
}

fn default_poisonous() -> String {
    "p".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupervisedBanditSpec {
    pub csv_path: PathBuf,
    /// Feature columns in order; defaults to every column not used by the
    /// reward rule.
    #[serde(default)]
    pub feature_columns: Option<Vec<String>>,
    /// Columns to one-hot encode; all others must be numeric.
    #[serde(default)]
    pub categorical_columns: Vec<String>,
    /// Treat every feature column as categorical.
    #[serde(default)]
    pub all_categorical: bool,
    #[serde(default)]
    pub label_column: Option<String>,
    pub reward_rule: RewardRule,
    #[serde(default)]
    pub shuffle_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Labels {
    Poisonous(Vec<bool>),
    OptimalDose(Vec<f64>),
    RewardTable(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedData {
    pub contexts: Vec<ContextVector>,
    /// Names of the encoded features (`col=value` for one-hot columns).
    pub feature_names: Vec<String>,
    pub labels: Labels,
}

impl SupervisedData {
    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn context_dim(&self) -> usize {
        self.feature_names.len()
    }
}

pub fn load_supervised_csv(spec: &SupervisedBanditSpec) -> Result<SupervisedData> {
    load_supervised_reader(std::fs::File::open(&spec.csv_path)?, spec)
}

fn ingest(row: usize, col: &str, msg: impl Into<String>) -> Error {
    Error::Ingest {
        row,
        col: col.to_string(),
        msg: msg.into(),
    }
}

/// Rows are numbered from 1 (the first line after the header).
pub fn load_supervised_reader<R: Read>(reader: R, spec: &SupervisedBanditSpec) -> Result<SupervisedData> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ingest(0, name, "column not found"))
    };
    let mut cells: Vec<Vec<String>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(ingest(i + 1, "*", format!("expected {} fields, got {}", header.len(), rec.len())));
        }
        let row: Vec<String> = rec.iter().map(|c| c.trim().to_string()).collect();
        if let Some(j) = row.iter().position(|c| c.is_empty()) {
            return Err(ingest(i + 1, &header[j], "missing value"));
        }
        cells.push(row);
    }
    if cells.is_empty() {
        return Err(ingest(0, "*", "no data rows"));
    }

    let mut reserved: Vec<usize> = Vec::new();
    let label_idx = match &spec.reward_rule {
        RewardRule::Table { reward_columns } => {
            for c in reward_columns {
                reserved.push(find(c)?);
            }
            None
        }
        _ => {
            let name = spec
                .label_column
                .as_deref()
                .ok_or_else(|| Error::Config("reward rule needs a label_column".into()))?;
            let idx = find(name)?;
            reserved.push(idx);
            Some(idx)
        }
    };
    let features: Vec<usize> = match &spec.feature_columns {
        Some(cols) => cols.iter().map(|c| find(c)).collect::<Result<_>>()?,
        None => (0..header.len()).filter(|j| !reserved.contains(j)).collect(),
    };
    for c in &spec.categorical_columns {
        find(c)?;
    }

    let parse = |row: usize, col: usize, s: &str| -> Result<f64> {
        let v: f64 = s.parse().map_err(|_| ingest(row + 1, &header[col], format!("not a number: {s:?}")))?;
        if !v.is_finite() {
            return Err(ingest(row + 1, &header[col], "not finite"));
        }
        Ok(v)
    };

    // Encoded columns, each a full-height block of values.
    let n = cells.len();
    let mut names = Vec::new();
    let mut blocks: Vec<Vec<f64>> = Vec::new();
    for &j in &features {
        let categorical = spec.all_categorical || spec.categorical_columns.contains(&header[j]);
        if categorical {
            let levels: BTreeMap<&str, usize> = {
                let mut set: Vec<&str> = cells.iter().map(|r| r[j].as_str()).collect();
                set.sort_unstable();
                set.dedup();
                set.into_iter().enumerate().map(|(i, s)| (s, i)).collect()
            };
            let base = blocks.len();
            for level in levels.keys() {
                names.push(format!("{}={}", header[j], level));
                blocks.push(vec![0.0; n]);
            }
            for (r, row) in cells.iter().enumerate() {
                blocks[base + levels[row[j].as_str()]][r] = 1.0;
            }
        } else {
            let vals = cells
                .iter()
                .enumerate()
                .map(|(r, row)| parse(r, j, &row[j]))
                .collect::<Result<Vec<f64>>>()?;
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo;
            names.push(header[j].clone());
            blocks.push(
                vals.iter()
                    .map(|v| if span > 0.0 { (v - lo) / span } else { 0.0 })
                    .collect(),
            );
        }
    }

    let labels = match &spec.reward_rule {
        RewardRule::Mushroom { poisonous_label } => {
            let j = label_idx.expect("label column");
            Labels::Poisonous(cells.iter().map(|r| &r[j] == poisonous_label).collect())
        }
        RewardRule::Dosage { k_levels } => {
            if *k_levels < 2 {
                return Err(Error::Config("dosage needs k_levels >= 2".into()));
            }
            let j = label_idx.expect("label column");
            Labels::OptimalDose(
                cells
                    .iter()
                    .enumerate()
                    .map(|(r, row)| parse(r, j, &row[j]))
                    .collect::<Result<_>>()?,
            )
        }
        RewardRule::Table { reward_columns } => {
            let cols: Vec<usize> = reward_columns.iter().map(|c| find(c)).collect::<Result<_>>()?;
            Labels::RewardTable(
                cells
                    .iter()
                    .enumerate()
                    .map(|(r, row)| cols.iter().map(|&j| parse(r, j, &row[j])).collect())
                    .collect::<Result<_>>()?,
            )
        }
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut RngSeed(spec.shuffle_seed).rng());
    let contexts = order
        .iter()
        .map(|&r| ContextVector::new(blocks.iter().map(|b| b[r]).collect()))
        .collect::<Result<Vec<_>>>()?;
    let labels = match labels {
        Labels::Poisonous(v) => Labels::Poisonous(order.iter().map(|&r| v[r]).collect()),
        Labels::OptimalDose(v) => Labels::OptimalDose(order.iter().map(|&r| v[r]).collect()),
        Labels::RewardTable(v) => Labels::RewardTable(order.iter().map(|&r| v[r].clone()).collect()),
    };
    Ok(SupervisedData {
        contexts,
        feature_names: names,
        labels,
    })
}

/// Streams the rows of a supervised dataset as bandit rounds, in the loaded
/// order; after a full pass the order is reshuffled with the environment
/// stream.
#[derive(Debug, Clone)]
pub struct SupervisedBandit {
    name: String,
    data: SupervisedData,
    n_actions: usize,
    dose_range: Option<(f64, f64)>,
    order: Vec<usize>,
    cursor: usize,
}

impl SupervisedBandit {
    pub fn new(name: impl Into<String>, data: SupervisedData, rule: &RewardRule) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Invalid("empty dataset".into()));
        }
        let (n_actions, dose_range) = match (&data.labels, rule) {
            (Labels::Poisonous(_), RewardRule::Mushroom { .. }) => (2, None),
            (Labels::OptimalDose(d), RewardRule::Dosage { k_levels }) => {
                let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if !(lo < hi) {
                    return Err(Error::Invalid("optimal doses are all equal".into()));
                }
                (*k_levels, Some((lo, hi)))
            }
            (Labels::RewardTable(t), RewardRule::Table { reward_columns }) => {
                check_dim(reward_columns.len(), t[0].len())?;
                (reward_columns.len(), None)
            }
            _ => return Err(Error::Config("labels do not match the reward rule".into())),
        };
        let order = (0..data.len()).collect();
        Ok(SupervisedBandit {
            name: name.into(),
            data,
            n_actions,
            dose_range,
            order,
            cursor: 0,
        })
    }

    pub fn data(&self) -> &SupervisedData {
        &self.data
    }

    pub fn dose_range(&self) -> Option<(f64, f64)> {
        self.dose_range
    }

    /// Round for row `i` of the loaded data.
    pub fn round_at(&self, i: usize) -> Result<Round> {
        let context = self.data.contexts[i].clone();
        Ok(match &self.data.labels {
            Labels::Poisonous(p) => Round {
                context,
                mean_rewards: mushroom_means(p[i]).to_vec(),
                noise: RewardNoise::Mushroom { poisonous: p[i] },
            },
            Labels::OptimalDose(d) => {
                let (lo, hi) = self.dose_range.expect("dosage range");
                let mean_rewards = (0..self.n_actions)
                    .map(|a| dosage_reward(d[i], ActionId(a), self.n_actions, lo, hi).map(|r| r.0))
                    .collect::<Result<_>>()?;
                Round {
                    context,
                    mean_rewards,
                    noise: RewardNoise::None,
                }
            }
            Labels::RewardTable(t) => Round {
                context,
                mean_rewards: t[i].clone(),
                noise: RewardNoise::None,
            },
        })
    }
}

impl Environment for SupervisedBandit {
    fn name(&self) -> &str {
        &self.name
    }

    fn n_actions(&self) -> usize {
        self.n_actions
    }

    fn context_dim(&self) -> usize {
        self.data.context_dim()
    }

    fn next_round(&mut self, rng: &mut Rng) -> Result<Round> {
        if self.cursor == self.order.len() {
            self.order.shuffle(rng);
            self.cursor = 0;
        }
        let i = self.order[self.cursor];
        self.cursor += 1;
        self.round_at(i)
    }
}
