use ndarray::Array2;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::propensity::PropensityTable;
use super::student::ImitationPolicy;
use super::transport::{solve_transport, ActionMetric};
use crate::divergences::{kl_discrete, pinsker_holds, smooth, tv_discrete, KL_SMOOTHING};
use crate::error::{check_dim, Error, Result};
use crate::policy::{softmax, Policy};
use crate::rng::Rng;
use crate::types::{sample_categorical, ActionDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Cross-entropy to the propensities, i.e. KL(π̂‖π^m) up to a constant.
    #[default]
    Kl,
    /// 1-Wasserstein distance under an action metric.
    Wasserstein,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// `|i − j|`, for ordered actions.
    #[default]
    Line,
    /// 1 between distinct actions.
    Discrete,
}

impl MetricKind {
    pub fn metric(self, k: usize) -> ActionMetric {
        match self {
            MetricKind::Line => ActionMetric::line(k),
            MetricKind::Discrete => ActionMetric::discrete(k),
        }
    }
}

/// How the Wasserstein logit gradient averages over `A ~ π^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    /// Score-function estimate from `n_policy_samples` draws.
    #[default]
    Sampled,
    /// Closed-form expectation over the `k` actions.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistillConfig {
    pub objective: Objective,
    pub n_minibatches: usize,
    pub batch_size: usize,
    /// Train on one sampled action per row instead of the soft propensities.
    pub hard_targets: bool,
    pub metric: MetricKind,
    pub gradient: GradientMode,
    pub n_policy_samples: usize,
    /// Subtract `Σ π^m g` from the potential in the sampled gradient.
    pub baseline: bool,
}

impl Default for DistillConfig {
    fn default() -> Self {
        DistillConfig {
            objective: Objective::Kl,
            n_minibatches: 2000,
            batch_size: 64,
            hard_targets: false,
            metric: MetricKind::Line,
            gradient: GradientMode::Sampled,
            n_policy_samples: 16,
            baseline: true,
        }
    }
}

/// Table-average divergences of the policy from the propensities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableDivergence {
    /// Mean KL(smoothed π̂ ‖ π^m), nats.
    pub kl: f64,
    pub tv: f64,
    pub w1: Option<f64>,
    /// Rows where TV > √(KL/2).
    pub pinsker_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistillReport {
    pub objective: Objective,
    pub before: TableDivergence,
    pub after: TableDivergence,
    /// Per-minibatch training loss: cross-entropy for KL, mean W₁ otherwise.
    pub loss_trace: Vec<f64>,
}

fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let p = softmax(row.as_slice().expect("standard layout"));
        row.assign(&ndarray::ArrayView1::from(&p[..]));
    }
    out
}

fn check_table(table: &PropensityTable, policy: &ImitationPolicy) -> Result<()> {
    check_dim(policy.context_dim(), table.context_dim())?;
    check_dim(policy.n_actions(), table.n_actions())
}

/// Mean KL, TV and (given a metric) W₁ between the table rows and the policy.
pub fn mean_divergence(
    table: &PropensityTable,
    policy: &ImitationPolicy,
    metric: Option<&ActionMetric>,
) -> Result<TableDivergence> {
    check_table(table, policy)?;
    const CHUNK: usize = 1024;
    let n = table.len();
    let (mut kl, mut tv, mut w1) = (0.0, 0.0, 0.0);
    let mut violations = 0;
    for start in (0..n).step_by(CHUNK) {
        let rows: Vec<usize> = (start..(start + CHUNK).min(n)).collect();
        let trace = policy.net().forward_batch(table.context_matrix(&rows).view())?;
        let probs = softmax_rows(trace.logits());
        for (r, &i) in rows.iter().enumerate() {
            let q = probs.row(r);
            let q = q.as_slice().expect("standard layout");
            let p = table.propensities()[i].probs();
            let row_kl = kl_discrete(&smooth(p, KL_SMOOTHING), q);
            let row_tv = tv_discrete(p, q);
            if !pinsker_holds(kl_discrete(p, q), row_tv) {
                violations += 1;
            }
            kl += row_kl;
            tv += row_tv;
            if let Some(m) = metric {
                w1 += solve_transport(p, q, m)?.value;
            }
        }
    }
    let n = n as f64;
    Ok(TableDivergence {
        kl: kl / n,
        tv: tv / n,
        w1: metric.map(|_| w1 / n),
        pinsker_violations: violations,
    })
}

fn draw_rows(n: usize, batch: usize, rng: &mut Rng) -> Vec<usize> {
    (0..batch).map(|_| rng.random_range(0..n)).collect()
}

fn validate(config: &DistillConfig) -> Result<()> {
    if config.batch_size == 0 {
        return Err(Error::Config("batch_size must be at least 1".into()));
    }
    if config.objective == Objective::Wasserstein
        && config.gradient == GradientMode::Sampled
        && config.n_policy_samples == 0
    {
        return Err(Error::Config("n_policy_samples must be at least 1".into()));
    }
    Ok(())
}

/// Minimises the cross-entropy `−Σ_a π̂(a|s) ln π^m(a|s)` by RMSProp over
/// minibatches of table rows, starting from the policy's current weights.
pub fn distill_kl(
    table: &PropensityTable,
    policy: &mut ImitationPolicy,
    config: &DistillConfig,
    rng: &mut Rng,
) -> Result<DistillReport> {
    check_table(table, policy)?;
    validate(config)?;
    let before = mean_divergence(table, policy, None)?;
    let k = table.n_actions();
    let (net, opt) = policy.parts_mut();
    opt.reset_schedule();
    let mut grad = vec![0.0; net.n_params()];
    let mut trace_loss = Vec::with_capacity(config.n_minibatches);
    let bsz = config.batch_size;
    let inv_b = 1.0 / bsz as f64;
    for _ in 0..config.n_minibatches {
        let rows = draw_rows(table.len(), bsz, rng);
        let trace = net.forward_batch(table.context_matrix(&rows).view())?;
        let probs = softmax_rows(trace.logits());
        let mut dlogits = Array2::zeros((bsz, k));
        let mut loss = 0.0;
        for (r, &i) in rows.iter().enumerate() {
            let target = table.propensities()[i].probs();
            let hard;
            let target = if config.hard_targets {
                hard = ActionDistribution::one_hot(k, sample_categorical(target, rng));
                hard.probs()
            } else {
                target
            };
            for a in 0..k {
                let p = probs[(r, a)];
                if target[a] > 0.0 {
                    loss -= target[a] * p.ln();
                }
                dlogits[(r, a)] = (p - target[a]) * inv_b;
            }
        }
        trace_loss.push(loss * inv_b);
        grad.fill(0.0);
        net.backward_batch(&trace, dlogits, &mut grad);
        opt.step(net.params_mut(), &grad);
    }
    let after = mean_divergence(table, policy, None)?;
    Ok(DistillReport {
        objective: Objective::Kl,
        before,
        after,
        loss_trace: trace_loss,
    })
}

/// Gradient of `W₁(target, softmax(z))` with respect to the logits `z`,
/// through the optimal Kantorovich potential `g`:
/// `−E_{A~π}[(g(A) − b) ∇_z ln π(A)]`, with `b = Σ π g` when `baseline`
/// is set. Returns the gradient and the distance.
pub fn wasserstein_logit_gradient(
    target: &[f64],
    probs: &[f64],
    metric: &ActionMetric,
    mode: GradientMode,
    n_samples: usize,
    baseline: bool,
    rng: &mut Rng,
) -> Result<(Vec<f64>, f64)> {
    let sol = solve_transport(target, probs, metric)?;
    let g = sol.potential.values();
    let mean_g: f64 = probs.iter().zip(g).map(|(p, g)| p * g).sum();
    let k = probs.len();
    let mut dz = vec![0.0; k];
    match mode {
        GradientMode::Exact => {
            for j in 0..k {
                dz[j] = -probs[j] * (g[j] - mean_g);
            }
        }
        GradientMode::Sampled => {
            if n_samples == 0 {
                return Err(Error::Invalid("n_samples must be at least 1".into()));
            }
            let b = if baseline { mean_g } else { 0.0 };
            let scale = 1.0 / n_samples as f64;
            for _ in 0..n_samples {
                let a = sample_categorical(probs, rng).0;
                let w = -(g[a] - b) * scale;
                if w != 0.0 {
                    for j in 0..k {
                        dz[j] -= w * probs[j];
                    }
                    dz[a] += w;
                }
            }
        }
    }
    Ok((dz, sol.value))
}

/// Parameter gradient of `W₁(π̂(·|s), π^m(·|s))` at one table row.
#[allow(clippy::too_many_arguments)]
pub fn wasserstein_policy_gradient(
    context: &[f64],
    target: &ActionDistribution,
    policy: &ImitationPolicy,
    metric: &ActionMetric,
    mode: GradientMode,
    n_samples: usize,
    baseline: bool,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    check_dim(policy.n_actions(), target.n_actions())?;
    check_dim(policy.n_actions(), metric.n_actions())?;
    let probs = policy.probs(context)?;
    let (dz, _) = wasserstein_logit_gradient(target.probs(), &probs, metric, mode, n_samples, baseline, rng)?;
    let mut grad = vec![0.0; policy.net().n_params()];
    policy.net().backward_logits(context, &dz, &mut grad)?;
    Ok(grad)
}

/// Minimises the table-average W₁ under `metric` by RMSProp on the
/// Kantorovich-dual policy gradient.
pub fn distill_wasserstein(
    table: &PropensityTable,
    policy: &mut ImitationPolicy,
    metric: &ActionMetric,
    config: &DistillConfig,
    rng: &mut Rng,
) -> Result<DistillReport> {
    check_table(table, policy)?;
    check_dim(table.n_actions(), metric.n_actions())?;
    validate(config)?;
    let before = mean_divergence(table, policy, Some(metric))?;
    let k = table.n_actions();
    let (net, opt) = policy.parts_mut();
    opt.reset_schedule();
    let mut grad = vec![0.0; net.n_params()];
    let mut trace_loss = Vec::with_capacity(config.n_minibatches);
    let bsz = config.batch_size;
    let inv_b = 1.0 / bsz as f64;
    for _ in 0..config.n_minibatches {
        let rows = draw_rows(table.len(), bsz, rng);
        let trace = net.forward_batch(table.context_matrix(&rows).view())?;
        let probs = softmax_rows(trace.logits());
        let mut dlogits = Array2::zeros((bsz, k));
        let mut loss = 0.0;
        for (r, &i) in rows.iter().enumerate() {
            let p = probs.row(r);
            let (dz, w1) = wasserstein_logit_gradient(
                table.propensities()[i].probs(),
                p.as_slice().expect("standard layout"),
                metric,
                config.gradient,
                config.n_policy_samples,
                config.baseline,
                rng,
            )?;
            loss += w1;
            for a in 0..k {
                dlogits[(r, a)] = dz[a] * inv_b;
            }
        }
        trace_loss.push(loss * inv_b);
        grad.fill(0.0);
        net.backward_batch(&trace, dlogits, &mut grad);
        opt.step(net.params_mut(), &grad);
    }
    let after = mean_divergence(table, policy, Some(metric))?;
    Ok(DistillReport {
        objective: Objective::Wasserstein,
        before,
        after,
        loss_trace: trace_loss,
    })
}

/// Runs the configured objective.
pub fn distill(
    table: &PropensityTable,
    policy: &mut ImitationPolicy,
    config: &DistillConfig,
    rng: &mut Rng,
) -> Result<DistillReport> {
    match config.objective {
        Objective::Kl => distill_kl(table, policy, config, rng),
        Objective::Wasserstein => {
            let metric = config.metric.metric(table.n_actions());
            distill_wasserstein(table, policy, &metric, config, rng)
        }
    }
}
