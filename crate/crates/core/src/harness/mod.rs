//! The batched experiment loop: act online with the deployed policy, and
//! every `batch_period` steps run the offline phase (posterior update, then
//! optional propensity simulation and distillation).

mod agent;
mod config;
mod latency;
mod metrics;

use std::fs;
use std::path::Path;

pub use agent::{build_policy, Agent};
pub use config::{ExperimentConfig, ImitationConfig, LatencyConfig, OutputConfig, PolicySpec, RunConfig};
pub use latency::{bench_latency, LatencyReport, LatencyStats, MachineInfo, MIN_LATENCY_REPS};
pub use metrics::{aggregate_trials, mean_sem, MetricsLog, PeriodMetrics, StepMetrics, Summary, SummaryRow};

use rand::Rng as _;

use crate::env::{Environment, LoggedDataset};
use crate::error::{check_dim, Error, Result};
use crate::imitation::{distill, simulate_propensities, DistillConfig, ImitationPolicy};
use crate::policy::Policy;
use crate::rng::{RngSeed, Stream};
use crate::types::{ActionId, ContextVector, InteractionRecord, Reward};

fn draw_contexts(env: &mut dyn Environment, n: usize, rng: &mut crate::Rng) -> Result<Vec<ContextVector>> {
    (0..n).map(|_| env.next_round(rng).map(|r| r.context)).collect()
}

/// One trial of the online loop with regret measured against the
/// environment's true means.
pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<MetricsLog> {
    config.validate()?;
    let seed = config.run.trial_seed(trial);
    let mut env = config.environment.build()?;
    let (d, k) = (env.context_dim(), env.n_actions());
    let mut agent = Agent::new(&config.policy, config.imitation.as_ref(), d, k, seed, config.run.exec)?;
    let mut env_rng = seed.stream(Stream::Environment);
    let mut deployed_rng = seed.stream(Stream::Deployed);
    let mut warmup_rng = seed.stream(Stream::Warmup);
    let mut policy_rng = seed.stream(Stream::Policy);
    let mut imitation_rng = seed.stream(Stream::Imitation);
    let fresh = config.imitation.as_ref().filter(|c| c.fresh_contexts).map(|c| c.n_fresh);
    let mut fresh_env = match fresh {
        Some(_) => Some(config.environment.build()?),
        None => None,
    };
    let mut fresh_rng = seed.stream(Stream::Data);

    let t_b = config.run.batch_period;
    let mut steps = Vec::with_capacity(config.run.horizon);
    let mut periods = Vec::new();
    let mut batch = Vec::with_capacity(t_b);
    let mut cumulative = 0.0;
    for t in 1..=config.run.horizon {
        let round = env.next_round(&mut env_rng)?;
        let action = agent.act(&round.context, Some(round.optimal_action()), &mut deployed_rng, &mut warmup_rng)?;
        let reward = round.sample_reward(action, &mut env_rng)?;
        let regret = round.regret(action);
        cumulative += regret;
        steps.push(StepMetrics {
            step: t as u64,
            action: action.0,
            reward: reward.0,
            regret,
            cumulative_regret: cumulative,
        });
        batch.push(InteractionRecord {
            context: round.context,
            action,
            reward,
            step: t as u64,
        });
        if t % t_b == 0 {
            let contexts = match (fresh, fresh_env.as_mut()) {
                (Some(n), Some(e)) => Some(draw_contexts(e.as_mut(), n.unwrap_or(t), &mut fresh_rng)?),
                _ => None,
            };
            let mut m = agent.offline_phase(&batch, contexts, &mut policy_rng, &mut imitation_rng)?;
            m.step = t as u64;
            m.cumulative_regret = cumulative;
            periods.push(m);
            batch.clear();
        }
    }
    let policy = match &config.imitation {
        Some(_) => format!("{}-IL", config.policy.label()),
        None => config.policy.label().to_string(),
    };
    Ok(MetricsLog {
        trial,
        seed: seed.0,
        policy,
        environment: env.name().to_string(),
        steps,
        periods,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub logs: Vec<MetricsLog>,
    /// Present when at least two trials ran.
    pub summary: Option<Summary>,
}

/// All trials, run through the configured executor.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let logs = config
        .run
        .exec
        .map_indexed(config.run.n_trials, |i| run_trial(config, i))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let summary = if logs.len() >= 2 { Some(aggregate_trials(&logs)?) } else { None };
    Ok(ExperimentResult { logs, summary })
}

/// Writes `metrics_<trial>.csv`, `periods_<trial>.csv` and
/// `timing_<trial>.csv` per trial, and `summary.csv`. Everything except the
/// timing files is a pure function of the config.
pub fn write_experiment(result: &ExperimentResult, output: &OutputConfig) -> Result<()> {
    let dir = &output.dir;
    fs::create_dir_all(dir)?;
    if output.per_trial {
        for log in &result.logs {
            log.write_steps_csv(fs::File::create(dir.join(format!("metrics_{}.csv", log.trial)))?)?;
            log.write_periods_csv(fs::File::create(dir.join(format!("periods_{}.csv", log.trial)))?)?;
            log.write_timing_csv(fs::File::create(dir.join(format!("timing_{}.csv", log.trial)))?)?;
        }
    }
    if let Some(s) = &result.summary {
        s.write_csv(fs::File::create(dir.join("summary.csv"))?)?;
    }
    Ok(())
}

/// Accepted records of an offline replay run.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineLog {
    pub trial: usize,
    pub seed: u64,
    pub records: Vec<InteractionRecord>,
    /// Logged tuples consumed, accepted or not.
    pub consumed: usize,
    pub periods: Vec<PeriodMetrics>,
}

impl OfflineLog {
    pub fn mean_reward(&self) -> f64 {
        self.records.iter().map(|r| r.reward.0).sum::<f64>() / self.records.len().max(1) as f64
    }

    /// `step,action,reward,cumulative_reward`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "action", "reward", "cumulative_reward"])?;
        let mut cum = 0.0;
        for r in &self.records {
            cum += r.reward.0;
            w.write_record([r.step.to_string(), r.action.0.to_string(), r.reward.0.to_string(), cum.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Rejection-sampling replay of the configured agent on logged data: the
/// agent learns from accepted tuples only and runs until `horizon` tuples
/// are accepted, with an offline phase every `batch_period` accepted tuples.
pub fn run_offline(config: &ExperimentConfig, data: &LoggedDataset, trial: usize) -> Result<OfflineLog> {
    config.validate()?;
    if matches!(config.policy, PolicySpec::Oracle) {
        return Err(Error::Config("the oracle needs known mean rewards".into()));
    }
    let seed = config.run.trial_seed(trial);
    let (d, k) = (data.context_dim(), data.n_actions());
    let mut agent = Agent::new(&config.policy, config.imitation.as_ref(), d, k, seed, config.run.exec)?;
    let mut replay_rng = seed.stream(Stream::Replay);
    let mut warmup_rng = seed.stream(Stream::Warmup);
    let mut policy_rng = seed.stream(Stream::Policy);
    let mut imitation_rng = seed.stream(Stream::Imitation);
    let wanted = config.run.horizon;
    let t_b = config.run.batch_period;
    let mut records = Vec::with_capacity(wanted);
    let mut batch: Vec<InteractionRecord> = Vec::with_capacity(t_b);
    let mut periods = Vec::new();
    let mut consumed = 0;
    while records.len() < wanted {
        let Some(t) = data.tuples().get(consumed) else {
            return Err(Error::Exhausted {
                consumed,
                valid: records.len(),
                wanted,
            });
        };
        consumed += 1;
        let a = agent.act(&t.context, None, &mut replay_rng, &mut warmup_rng)?;
        if a != t.action {
            continue;
        }
        let rec = InteractionRecord {
            context: t.context.clone(),
            action: a,
            reward: t.reward,
            step: records.len() as u64 + 1,
        };
        records.push(rec.clone());
        batch.push(rec);
        if records.len() % t_b == 0 {
            let mut m = agent.offline_phase(&batch, None, &mut policy_rng, &mut imitation_rng)?;
            m.step = records.len() as u64;
            periods.push(m);
            batch.clear();
        }
    }
    Ok(OfflineLog {
        trial,
        seed: seed.0,
        records,
        consumed,
        periods,
    })
}

/// Warms up every configured policy with one update on `batch_period`
/// uniformly-logged rounds, then times its decisions. With imitation
/// enabled, a network distilled from the base policy is timed too.
pub fn bench_from_config(config: &ExperimentConfig) -> Result<LatencyReport> {
    config.validate()?;
    let lat = config.latency.clone().unwrap_or_default();
    let seed = RngSeed(config.run.seed);
    let mut env = config.environment.build()?;
    let (d, k) = (env.context_dim(), env.n_actions());
    let mut env_rng = seed.stream(Stream::Environment);
    let mut warm = seed.stream(Stream::Warmup);
    let mut records = Vec::with_capacity(config.run.batch_period);
    for t in 0..config.run.batch_period {
        let round = env.next_round(&mut env_rng)?;
        let a = ActionId(warm.random_range(0..k));
        let reward: Reward = round.sample_reward(a, &mut env_rng)?;
        records.push(InteractionRecord {
            context: round.context,
            action: a,
            reward,
            step: t as u64 + 1,
        });
    }
    let contexts = draw_contexts(env.as_mut(), 1024, &mut env_rng)?;
    let mut specs = lat.policies.clone();
    if specs.is_empty() {
        specs = vec![config.policy.clone(), PolicySpec::Uniform];
    }
    let mut rows = Vec::new();
    let mut bench_rng = seed.stream(Stream::Deployed);
    let mut policy_rng = seed.stream(Stream::Policy);
    for (i, spec) in specs.iter().enumerate() {
        let Some(mut p) = build_policy(spec, d, k, &mut seed.derive_index(i as u64).rng())? else {
            continue;
        };
        p.update(&records, &mut policy_rng)?;
        rows.push(bench_latency(p.as_ref(), &contexts, lat.n_reps, lat.batch, &mut bench_rng)?);
        if lat.imitation && i == 0 {
            let il = config.imitation.clone().unwrap_or_default();
            let mut student = ImitationPolicy::new(d, k, &il.hidden, &mut seed.stream(Stream::Imitation))?;
            let warm_contexts: Vec<ContextVector> = records.iter().take(256).map(|r| r.context.clone()).collect();
            let table = simulate_propensities(p.as_ref(), &warm_contexts, il.n_a.min(256), seed, config.run.exec)?;
            let cfg = DistillConfig {
                n_minibatches: lat.warmup_minibatches,
                ..il.distill
            };
            distill(&table, &mut student, &cfg, &mut seed.stream(Stream::Imitation))?;
            let mut s = bench_latency(&student, &contexts, lat.n_reps, lat.batch, &mut bench_rng)?;
            s.policy = format!("{}-IL", p.name());
            rows.push(s);
        }
    }
    Ok(LatencyReport {
        machine: MachineInfo::current(),
        rows,
    })
}

pub fn write_latency(report: &LatencyReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    report.write_csv(fs::File::create(dir.join("latency.csv"))?)
}

/// Checks that a deployed policy matches an environment's shape.
pub fn check_policy_shape(policy: &dyn Policy, env: &dyn Environment) -> Result<()> {
    check_dim(env.context_dim(), policy.context_dim())?;
    check_dim(env.n_actions(), policy.n_actions())
}
