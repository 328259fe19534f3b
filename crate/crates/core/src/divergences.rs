//! Distances between discrete action distributions. All logarithms are
//! natural, so KL values are in nats.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::imitation::{solve_kantorovich_dual, ActionMetric};
use crate::types::ActionDistribution;

/// Pseudo-count used when smoothing empirical propensities before a KL
/// diagnostic.
pub const KL_SMOOTHING: f64 = 1e-6;

/// `Σ p ln(p/q)` with `0 ln(0/q) = 0`; `+∞` when `p` puts mass where `q`
/// has none.
pub fn kl_discrete(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let mut kl = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            kl += pi * (pi / qi).ln();
        }
    }
    // rounding can leave a tiny negative value when p ≈ q
    kl.max(0.0)
}

/// `½ Σ |p − q|`.
pub fn tv_discrete(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Cross-entropy `−Σ p ln q`.
pub fn cross_entropy(p: &[f64], q: &[f64]) -> f64 {
    -p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi * qi.ln())
        .sum::<f64>()
}

pub fn entropy(p: &[f64]) -> f64 {
    cross_entropy(p, p)
}

/// Laplace smoothing `(p + ε) / (1 + kε)`.
pub fn smooth(p: &[f64], eps: f64) -> Vec<f64> {
    let z = 1.0 + eps * p.len() as f64;
    p.iter().map(|v| (v + eps) / z).collect()
}

/// Whether `tv ≤ √(kl/2)` holds (vacuous for infinite KL).
pub fn pinsker_holds(kl: f64, tv: f64) -> bool {
    !kl.is_finite() || tv <= (kl / 2.0).sqrt() + 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub kl: f64,
    pub tv: f64,
    pub w1: Option<f64>,
    pub pinsker_ok: bool,
}

impl DivergenceReport {
    /// KL(p‖q), TV(p, q), and W₁ when a metric is given.
    pub fn compute(
        p: &ActionDistribution,
        q: &ActionDistribution,
        metric: Option<&ActionMetric>,
    ) -> Result<Self> {
        check_dim(p.n_actions(), q.n_actions())?;
        let kl = kl_discrete(p.probs(), q.probs());
        let tv = tv_discrete(p.probs(), q.probs());
        let w1 = match metric {
            Some(m) => Some(solve_kantorovich_dual(p, q, m)?.value),
            None => None,
        };
        Ok(DivergenceReport {
            kl,
            tv,
            w1,
            pinsker_ok: pinsker_holds(kl, tv),
        })
    }
}
