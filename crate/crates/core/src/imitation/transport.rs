//! Exact discrete optimal transport: the transportation simplex on the
//! `k × k` coupling, with Kantorovich potentials recovered from the optimal
//! basis.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::types::ActionDistribution;

/// Ground metric on the action set: symmetric, zero diagonal, non-negative,
/// and satisfying the triangle inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionMetric {
    k: usize,
    d: Vec<f64>,
}

const METRIC_TOL: f64 = 1e-12;

impl ActionMetric {
    pub fn new(k: usize, d: Vec<f64>) -> Result<Self> {
        check_dim(k * k, d.len())?;
        let at = |i: usize, j: usize| d[i * k + j];
        for i in 0..k {
            if at(i, i) != 0.0 {
                return Err(Error::Invalid(format!("metric diagonal d({i},{i}) must be 0")));
            }
            for j in 0..k {
                let v = at(i, j);
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::Invalid(format!("metric entry d({i},{j}) = {v}")));
                }
                if (v - at(j, i)).abs() > METRIC_TOL {
                    return Err(Error::Invalid(format!("metric not symmetric at ({i},{j})")));
                }
                for m in 0..k {
                    if v > at(i, m) + at(m, j) + METRIC_TOL {
                        return Err(Error::Invalid(format!(
                            "triangle inequality fails for ({i},{m},{j})"
                        )));
                    }
                }
            }
        }
        Ok(ActionMetric { k, d })
    }

    /// `d(i, j) = |i − j|`, for ordered actions.
    pub fn line(k: usize) -> Self {
        let d = (0..k * k).map(|c| (c / k).abs_diff(c % k) as f64).collect();
        ActionMetric { k, d }
    }

    /// `d(i, j) = 1` for `i ≠ j`; the resulting W₁ is the total variation.
    pub fn discrete(k: usize) -> Self {
        let d = (0..k * k).map(|c| if c / k == c % k { 0.0 } else { 1.0 }).collect();
        ActionMetric { k, d }
    }

    pub fn zero(k: usize) -> Self {
        ActionMetric { k, d: vec![0.0; k * k] }
    }

    pub fn n_actions(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.k + j]
    }

    pub fn max_entry(&self) -> f64 {
        self.d.iter().cloned().fold(0.0, f64::max)
    }
}

/// Potential `g` on the actions; feasible when `|g(a) − g(b)| ≤ d(a, b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualPotential(pub Vec<f64>);

impl DualPotential {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Largest `g(a) − g(b) − d(a, b)` over all pairs (≤ 0 when feasible).
    pub fn max_lipschitz_violation(&self, metric: &ActionMetric) -> f64 {
        let g = &self.0;
        let mut worst = f64::NEG_INFINITY;
        for a in 0..g.len() {
            for b in 0..g.len() {
                worst = worst.max(g[a] - g[b] - metric.get(a, b));
            }
        }
        worst
    }

    /// `Σ g p − Σ g q`.
    pub fn gap(&self, p: &[f64], q: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(p.iter().zip(q))
            .map(|(g, (pi, qi))| g * (pi - qi))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportSolution {
    /// Optimal transport cost `Σ γ_ij d_ij` (the primal value).
    pub value: f64,
    /// Kantorovich potential attaining `value = Σ g p − Σ g q`.
    pub potential: DualPotential,
    /// Optimal coupling, row-major `k × k`, rows indexed by `p`.
    pub plan: Vec<f64>,
    pub pivots: usize,
}

/// Solves `W₁(p, q) = min_γ Σ γ_ij d(i, j)` over couplings of `p` and `q` and
/// returns an optimal 1-Lipschitz dual potential.
pub fn solve_kantorovich_dual(
    p: &ActionDistribution,
    q: &ActionDistribution,
    metric: &ActionMetric,
) -> Result<TransportSolution> {
    check_dim(p.n_actions(), q.n_actions())?;
    check_dim(metric.n_actions(), p.n_actions())?;
    solve_transport(p.probs(), q.probs(), metric)
}

/// [`solve_kantorovich_dual`] on raw probability slices.
pub fn solve_transport(p: &[f64], q: &[f64], metric: &ActionMetric) -> Result<TransportSolution> {
    let k = metric.n_actions();
    check_dim(k, p.len())?;
    check_dim(k, q.len())?;
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    if (sp - sq).abs() > 1e-9 || p.iter().chain(q).any(|v| !(*v >= 0.0)) {
        return Err(Error::Numerical(format!(
            "transport marginals must be non-negative with equal mass ({sp} vs {sq})"
        )));
    }
    if p.iter().zip(q).all(|(a, b)| a == b) {
        // Every 1-Lipschitz potential is optimal here; zero is the
        // minimum-norm choice and makes the target a stationary point.
        let plan = (0..k * k).map(|c| if c / k == c % k { p[c / k] } else { 0.0 }).collect();
        return Ok(TransportSolution {
            value: 0.0,
            potential: DualPotential(vec![0.0; k]),
            plan,
            pivots: 0,
        });
    }
    let mut simplex = TransportSimplex::new(p, q, metric);
    simplex.solve()?;
    let (_, v) = simplex.potentials();
    let plan = simplex.plan();
    let value: f64 = plan
        .iter()
        .enumerate()
        .map(|(c, x)| x * metric.get(c / k, c % k))
        .sum();
    // c-transform of the column potentials: g(i) = min_j d(i, j) − v_j.
    // It is 1-Lipschitz by the triangle inequality and attains the optimum.
    let g: Vec<f64> = (0..k)
        .map(|i| (0..k).map(|j| metric.get(i, j) - v[j]).fold(f64::INFINITY, f64::min))
        .collect();
    Ok(TransportSolution {
        value,
        potential: DualPotential(g),
        plan,
        pivots: simplex.pivots,
    })
}

/// Degenerate pivots tolerated under Dantzig pricing before switching to
/// Bland's rule.
const DEGENERATE_PIVOT_LIMIT: usize = 64;

struct TransportSimplex<'a> {
    k: usize,
    metric: &'a ActionMetric,
    /// Basic cells `(row, col)` with their flows; always `2k − 1` entries
    /// forming a spanning tree of the bipartite row/column graph.
    basis: Vec<(usize, usize)>,
    flow: Vec<f64>,
    in_basis: Vec<bool>,
    pivots: usize,
    tol: f64,
}

impl<'a> TransportSimplex<'a> {
    /// Northwest-corner initial basis.
    fn new(p: &[f64], q: &[f64], metric: &'a ActionMetric) -> Self {
        let k = p.len();
        let mut supply = p.to_vec();
        let mut demand = q.to_vec();
        let mut basis = Vec::with_capacity(2 * k - 1);
        let mut flow = Vec::with_capacity(2 * k - 1);
        let mut in_basis = vec![false; k * k];
        let (mut i, mut j) = (0, 0);
        loop {
            let x = supply[i].min(demand[j]).max(0.0);
            supply[i] -= x;
            demand[j] -= x;
            basis.push((i, j));
            flow.push(x);
            in_basis[i * k + j] = true;
            if i == k - 1 && j == k - 1 {
                break;
            }
            if i == k - 1 {
                j += 1;
            } else if j == k - 1 || supply[i] <= demand[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
        TransportSimplex {
            k,
            metric,
            basis,
            flow,
            in_basis,
            pivots: 0,
            tol: 1e-12 * metric.max_entry().max(1.0),
        }
    }

    /// Tree adjacency: node ids `0..k` are rows, `k..2k` columns; each entry
    /// is `(neighbour, basis index)`.
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); 2 * self.k];
        for (b, &(i, j)) in self.basis.iter().enumerate() {
            adj[i].push((self.k + j, b));
            adj[self.k + j].push((i, b));
        }
        adj
    }

    /// Solves `u_i + v_j = d_ij` on basic cells with `u_0 = 0`.
    fn potentials(&self) -> (Vec<f64>, Vec<f64>) {
        let k = self.k;
        let adj = self.adjacency();
        let mut pot = vec![f64::NAN; 2 * k];
        pot[0] = 0.0;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            for &(m, b) in &adj[n] {
                if pot[m].is_nan() {
                    let (i, j) = self.basis[b];
                    pot[m] = self.metric.get(i, j) - pot[n];
                    stack.push(m);
                }
            }
        }
        let v = pot.split_off(k);
        (pot, v)
    }

    fn entering(&self, u: &[f64], v: &[f64], bland: bool) -> Option<(usize, usize)> {
        let k = self.k;
        let mut best = None;
        let mut best_rc = -self.tol;
        for i in 0..k {
            for j in 0..k {
                if self.in_basis[i * k + j] {
                    continue;
                }
                let rc = self.metric.get(i, j) - u[i] - v[j];
                if rc < best_rc {
                    if bland {
                        return Some((i, j));
                    }
                    best_rc = rc;
                    best = Some((i, j));
                }
            }
        }
        best
    }

    /// Basis indices on the tree path from row `i0` to column `j0`, ordered
    /// from the row end.
    fn path(&self, i0: usize, j0: usize) -> Vec<usize> {
        let adj = self.adjacency();
        let target = self.k + j0;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; 2 * self.k];
        let mut seen = vec![false; 2 * self.k];
        seen[i0] = true;
        let mut stack = vec![i0];
        while let Some(n) = stack.pop() {
            if n == target {
                break;
            }
            for &(m, b) in &adj[n] {
                if !seen[m] {
                    seen[m] = true;
                    parent[m] = Some((n, b));
                    stack.push(m);
                }
            }
        }
        let mut edges = Vec::new();
        let mut n = target;
        while n != i0 {
            let (prev, b) = parent[n].expect("basis is a spanning tree");
            edges.push(b);
            n = prev;
        }
        edges.reverse();
        edges
    }

    fn solve(&mut self) -> Result<()> {
        let k = self.k;
        let max_pivots = 50 * k * k + 1000;
        let mut degenerate_run = 0;
        let mut bland = false;
        loop {
            let (u, v) = self.potentials();
            let Some((i0, j0)) = self.entering(&u, &v, bland) else {
                return Ok(());
            };
            self.pivots += 1;
            if self.pivots > max_pivots {
                return Err(Error::Numerical(format!(
                    "transport simplex did not converge in {max_pivots} pivots"
                )));
            }
            // Path edges alternate starting from the row end; the edge at the
            // column end loses flow, so with odd path length the first does too.
            let path = self.path(i0, j0);
            let mut theta = f64::INFINITY;
            let mut leave = usize::MAX;
            for (pos, &b) in path.iter().enumerate() {
                if pos % 2 == 0 {
                    let f = self.flow[b];
                    let (i, j) = self.basis[b];
                    let better = f < theta
                        || (bland && f == theta && i * k + j < {
                            let (li, lj) = self.basis[leave];
                            li * k + lj
                        });
                    if better {
                        theta = f;
                        leave = b;
                    }
                }
            }
            for (pos, &b) in path.iter().enumerate() {
                if pos % 2 == 0 {
                    self.flow[b] -= theta;
                } else {
                    self.flow[b] += theta;
                }
            }
            if theta <= 0.0 {
                degenerate_run += 1;
                if degenerate_run > DEGENERATE_PIVOT_LIMIT {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            let (li, lj) = self.basis[leave];
            self.in_basis[li * k + lj] = false;
            self.in_basis[i0 * k + j0] = true;
            self.basis[leave] = (i0, j0);
            self.flow[leave] = theta;
        }
    }

    fn plan(&self) -> Vec<f64> {
        let mut plan = vec![0.0; self.k * self.k];
        for (&(i, j), &f) in self.basis.iter().zip(&self.flow) {
            plan[i * self.k + j] = f.max(0.0);
        }
        plan
    }
}
