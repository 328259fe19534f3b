use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::metrics::mean_sem;
use crate::error::{check_dim, Error, Result};
use crate::policy::Policy;
use crate::rng::Rng;
use crate::types::ContextVector;

/// Smallest accepted number of timed decisions.
pub const MIN_LATENCY_REPS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub policy: String,
    pub context_dim: usize,
    pub n_actions: usize,
    pub n_reps: usize,
    pub mean_ms: f64,
    /// Two standard errors of `mean_ms`, from the spread of batch means.
    pub two_se_ms: f64,
    /// Median of the per-batch mean latencies; robust to scheduler hiccups.
    pub median_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineInfo {
    pub os: String,
    pub arch: String,
    pub logical_cpus: usize,
}

impl MachineInfo {
    pub fn current() -> Self {
        MachineInfo {
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            logical_cpus: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub machine: MachineInfo,
    pub rows: Vec<LatencyStats>,
}

impl LatencyReport {
    pub fn get(&self, policy: &str) -> Option<&LatencyStats> {
        self.rows.iter().find(|r| r.policy == policy)
    }

    /// `policy,context_dim,n_actions,n_reps,mean_ms,two_se_ms,median_ms,os,arch,logical_cpus`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "policy",
            "context_dim",
            "n_actions",
            "n_reps",
            "mean_ms",
            "two_se_ms",
            "median_ms",
            "os",
            "arch",
            "logical_cpus",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.policy.clone(),
                r.context_dim.to_string(),
                r.n_actions.to_string(),
                r.n_reps.to_string(),
                r.mean_ms.to_string(),
                r.two_se_ms.to_string(),
                r.median_ms.to_string(),
                self.machine.os.clone(),
                self.machine.arch.clone(),
                self.machine.logical_cpus.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Times `policy.act` alone over `n_reps` calls, cycling through `contexts`,
/// in batches of `batch` calls on the current thread.
pub fn bench_latency(
    policy: &dyn Policy,
    contexts: &[ContextVector],
    n_reps: usize,
    batch: usize,
    rng: &mut Rng,
) -> Result<LatencyStats> {
    if n_reps < MIN_LATENCY_REPS {
        return Err(Error::Config(format!("latency needs at least {MIN_LATENCY_REPS} repetitions")));
    }
    if contexts.is_empty() || batch == 0 {
        return Err(Error::Config("latency needs contexts and a positive batch size".into()));
    }
    for c in contexts {
        check_dim(policy.context_dim(), c.dim())?;
    }
    let n_batches = n_reps.div_ceil(batch);
    let mut per_call = Vec::with_capacity(n_batches);
    let mut next = 0;
    for _ in 0..n_batches {
        let start = Instant::now();
        for _ in 0..batch {
            let a = policy.act(black_box(&contexts[next]), rng)?;
            black_box(a);
            next += 1;
            if next == contexts.len() {
                next = 0;
            }
        }
        per_call.push(start.elapsed().as_secs_f64() * 1e3 / batch as f64);
    }
    let (mean, sem) = mean_sem(&per_call);
    let mut sorted = per_call.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    Ok(LatencyStats {
        policy: policy.name().to_string(),
        context_dim: policy.context_dim(),
        n_actions: policy.n_actions(),
        n_reps: n_batches * batch,
        mean_ms: mean,
        two_se_ms: 2.0 * sem,
        median_ms: sorted[sorted.len() / 2],
    })
}
