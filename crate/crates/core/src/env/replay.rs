//! Offline evaluation on logged bandit data by rejection sampling: a logged
//! tuple counts only when the evaluated policy picks the logged action.
//! Under a uniform logging policy the accepted stream is distributed as an
//! online run of the evaluated policy.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{check_dim, Error, Result};
use crate::policy::Policy;
use crate::rng::Rng;
use crate::types::{ActionId, ContextVector, InteractionRecord, Reward};

#[derive(Debug, Clone, PartialEq)]
pub struct LoggedTuple {
    pub context: ContextVector,
    pub action: ActionId,
    pub reward: Reward,
}

/// Tuples logged under the uniform policy over `n_actions` actions.
#[derive(Debug, Clone, PartialEq)]
pub struct LoggedDataset {
    tuples: Vec<LoggedTuple>,
    n_actions: usize,
}

impl LoggedDataset {
    pub fn new(tuples: Vec<LoggedTuple>, n_actions: usize) -> Result<Self> {
        if let Some(first) = tuples.first() {
            let d = first.context.dim();
            for t in &tuples {
                check_dim(d, t.context.dim())?;
                ActionId::checked(t.action.0, n_actions)?;
            }
        }
        Ok(LoggedDataset { tuples, n_actions })
    }

    pub fn tuples(&self) -> &[LoggedTuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn context_dim(&self) -> usize {
        self.tuples.first().map(|t| t.context.dim()).unwrap_or(0)
    }

    /// Columns `ctx_0..ctx_{d-1},action,reward`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<String> = (0..self.context_dim())
            .map(|i| format!("ctx_{i}"))
            .chain(["action".to_string(), "reward".to_string()])
            .collect();
        w.write_record(&header)?;
        for t in &self.tuples {
            let row: Vec<String> = t
                .context
                .iter()
                .map(|v| format!("{v:?}"))
                .chain([t.action.0.to_string(), format!("{:?}", t.reward.0)])
                .collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// `n_actions` defaults to one more than the largest logged action.
    pub fn read_csv<R: Read>(input: R, n_actions: Option<usize>) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let d = header.iter().take_while(|h| h.starts_with("ctx_")).count();
        if header.len() != d + 2 || header[d] != "action" || header[d + 1] != "reward" {
            return Err(Error::Ingest {
                row: 0,
                col: "header".into(),
                msg: "expected ctx_* columns, then action, reward".into(),
            });
        }
        let mut tuples = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let cell = |j: usize| -> Result<f64> {
                let s = rec.get(j).unwrap_or("").trim();
                s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Ingest {
                    row: i + 1,
                    col: header[j].clone(),
                    msg: format!("not a finite number: {s:?}"),
                })
            };
            let context = ContextVector::new((0..d).map(&cell).collect::<Result<_>>()?)?;
            let a = cell(d)?;
            if a < 0.0 || a.fract() != 0.0 {
                return Err(Error::Ingest {
                    row: i + 1,
                    col: "action".into(),
                    msg: format!("not an action index: {a}"),
                });
            }
            tuples.push(LoggedTuple {
                context,
                action: ActionId(a as usize),
                reward: Reward(cell(d + 1)?),
            });
        }
        let k = n_actions.unwrap_or_else(|| tuples.iter().map(|t| t.action.0 + 1).max().unwrap_or(1));
        Self::new(tuples, k)
    }

    pub fn load(path: impl AsRef<Path>, n_actions: Option<usize>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?, n_actions)
    }
}

/// Position in the logged stream and the number of valid steps so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReplayCursor {
    pub position: usize,
    pub valid: usize,
    /// Valid steps the evaluation needs; reported when data runs out.
    pub wanted: usize,
}

impl ReplayCursor {
    pub fn new(wanted: usize) -> Self {
        ReplayCursor {
            position: 0,
            valid: 0,
            wanted,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReplayOutcome {
    Accepted(InteractionRecord),
    Rejected,
}

/// Consumes one logged tuple: draws `a ~ policy(·|x_t)` and accepts the tuple
/// when `a` equals the logged action.
pub fn replay_step(
    dataset: &LoggedDataset,
    cursor: &mut ReplayCursor,
    policy: &dyn Policy,
    rng: &mut Rng,
) -> Result<ReplayOutcome> {
    let Some(t) = dataset.tuples.get(cursor.position) else {
        return Err(Error::Exhausted {
            consumed: cursor.position,
            valid: cursor.valid,
            wanted: cursor.wanted,
        });
    };
    cursor.position += 1;
    let a = policy.act(&t.context, rng)?;
    if a != t.action {
        return Ok(ReplayOutcome::Rejected);
    }
    cursor.valid += 1;
    Ok(ReplayOutcome::Accepted(InteractionRecord {
        context: t.context.clone(),
        action: t.action,
        reward: t.reward,
        step: cursor.valid as u64,
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayResult {
    pub records: Vec<InteractionRecord>,
    pub consumed: usize,
}

impl ReplayResult {
    pub fn mean_reward(&self) -> f64 {
        self.records.iter().map(|r| r.reward.0).sum::<f64>() / self.records.len().max(1) as f64
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.records.len() as f64 / self.consumed.max(1) as f64
    }
}

/// Replays a fixed policy until `n_valid` tuples are accepted.
pub fn replay_evaluate(
    dataset: &LoggedDataset,
    policy: &dyn Policy,
    n_valid: usize,
    rng: &mut Rng,
) -> Result<ReplayResult> {
    check_dim(dataset.n_actions(), policy.n_actions())?;
    check_dim(dataset.context_dim(), policy.context_dim())?;
    let mut cursor = ReplayCursor::new(n_valid);
    let mut records = Vec::with_capacity(n_valid);
    while cursor.valid < n_valid {
        if let ReplayOutcome::Accepted(rec) = replay_step(dataset, &mut cursor, policy, rng)? {
            records.push(rec);
        }
    }
    Ok(ReplayResult {
        records,
        consumed: cursor.position,
    })
}
