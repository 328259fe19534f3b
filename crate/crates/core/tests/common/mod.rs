//! Reference implementations shared by the integration suites.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use tsil::bayes_linear::{NigParams, SufficientStats};
use tsil::imitation::ActionMetric;
use tsil::linalg::Matrix;
use tsil::neural::{Mlp, MlpSpec};
use tsil::{ActionDistribution, Rng};

pub fn random_spd(d: usize, rng: &mut Rng) -> Matrix {
    let a: Vec<f64> = (0..d * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a = Matrix::from_vec(d, d, a);
    let mut s = a.matmul(&a.transpose());
    s.add_diagonal(0.5);
    s
}

pub fn random_prior(d: usize, rng: &mut Rng) -> NigParams {
    NigParams {
        mu: (0..d).map(|_| rng.random_range(-2.0..2.0)).collect(),
        lambda: random_spd(d, rng),
        alpha: rng.random_range(0.5..10.0),
        beta: rng.random_range(0.1..10.0),
    }
}

pub fn random_batch(d: usize, n: usize, rng: &mut Rng) -> Vec<(Vec<f64>, f64)> {
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.5..1.5)).collect();
            let y = rng.random_range(-3.0..3.0);
            (x, y)
        })
        .collect()
}

pub fn stats(d: usize, rows: &[(Vec<f64>, f64)]) -> SufficientStats {
    SufficientStats::from_rows(d, rows.iter().map(|(x, y)| (x.as_slice(), *y)))
}

pub fn dense(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// The textbook posterior, with explicit dense inverses.
pub fn reference_update(prior: &NigParams, rows: &[(Vec<f64>, f64)]) -> (DVector<f64>, DMatrix<f64>, f64, f64) {
    let d = prior.dim();
    let x = DMatrix::from_fn(rows.len(), d, |i, j| rows[i].0[j]);
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let l0 = dense(&prior.lambda);
    let m0 = DVector::from_column_slice(&prior.mu);
    let ln = x.transpose() * &x + &l0;
    let mn = ln.clone().try_inverse().unwrap() * (&l0 * &m0 + x.transpose() * &y);
    let an = prior.alpha + rows.len() as f64 / 2.0;
    let bn = prior.beta + 0.5 * (y.dot(&y) + m0.dot(&(&l0 * &m0)) - mn.dot(&(&ln * &mn)));
    (mn, ln, an, bn)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Dense two-phase simplex with Bland's rule on
/// `min cᵀx, A x = b, x ≥ 0`, `b ≥ 0`. Returns the optimal value.
pub fn dense_lp(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> f64 {
    let (m, n) = (a.len(), c.len());
    let width = n + m + 1;
    let rhs = n + m;
    let mut t: Vec<Vec<f64>> = (0..m)
        .map(|r| {
            let mut row = vec![0.0; width];
            row[..n].copy_from_slice(&a[r]);
            row[n + r] = 1.0;
            row[rhs] = b[r];
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, c: usize) {
        let pv = t[r][c];
        for v in t[r].iter_mut() {
            *v /= pv;
        }
        let prow = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && row[c] != 0.0 {
                let f = row[c];
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= f * p;
                }
            }
        }
        basis[r] = c;
    }

    fn run(t: &mut [Vec<f64>], basis: &mut [usize], cost: &[f64], allowed: usize, rhs: usize) {
        loop {
            let entering = (0..allowed).find(|&c| {
                if basis.contains(&c) {
                    return false;
                }
                let reduced = cost[c] - t.iter().zip(basis.iter()).map(|(row, &bv)| cost[bv] * row[c]).sum::<f64>();
                reduced < -1e-11
            });
            let Some(c) = entering else { return };
            let mut best: Option<(f64, usize, usize)> = None;
            for (r, row) in t.iter().enumerate() {
                if row[c] > 1e-12 {
                    let ratio = row[rhs] / row[c];
                    let better = match best {
                        None => true,
                        Some((br, _, bb)) => ratio < br - 1e-14 || (ratio <= br + 1e-14 && basis[r] < bb),
                    };
                    if better {
                        best = Some((ratio, r, basis[r]));
                    }
                }
            }
            let (_, r, _) = best.expect("bounded problem");
            pivot(t, basis, r, c);
        }
    }

    // phase 1: drive the artificial variables to zero
    let mut phase1 = vec![0.0; n + m];
    for v in &mut phase1[n..] {
        *v = 1.0;
    }
    run(&mut t, &mut basis, &phase1, n + m, rhs);
    for r in 0..m {
        if basis[r] >= n {
            assert!(t[r][rhs].abs() < 1e-9, "infeasible");
            if let Some(c) = (0..n).find(|&c| t[r][c].abs() > 1e-9 && !basis.contains(&c)) {
                pivot(&mut t, &mut basis, r, c);
            }
            // otherwise the row is redundant and its artificial stays at 0
        }
    }
    // phase 2 over the structural columns only
    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat_n(0.0, m));
    run(&mut t, &mut basis, &cost, n, rhs);
    t.iter().zip(&basis).map(|(row, &bv)| cost[bv] * row[rhs]).sum()
}

pub fn lp_w1(p: &[f64], q: &[f64], metric: &ActionMetric) -> f64 {
    let k = p.len();
    let mut a = vec![vec![0.0; k * k]; 2 * k];
    let mut c = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            a[i][i * k + j] = 1.0;
            a[k + j][i * k + j] = 1.0;
            c[i * k + j] = metric.get(i, j);
        }
    }
    let b: Vec<f64> = p.iter().chain(q).copied().collect();
    dense_lp(&a, &b, &c)
}

pub fn random_distribution(k: usize, rng: &mut Rng) -> ActionDistribution {
    // about a third of the entries are exactly zero to exercise degeneracy
    let w: Vec<f64> = (0..k)
        .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random::<f64>() })
        .collect();
    if w.iter().all(|v| *v == 0.0) {
        return ActionDistribution::one_hot(k, tsil::ActionId(rng.random_range(0..k)));
    }
    ActionDistribution::from_weights(&w).unwrap()
}

pub fn random_metric(k: usize, rng: &mut Rng) -> ActionMetric {
    match rng.random_range(0..3) {
        0 => ActionMetric::line(k),
        1 => ActionMetric::discrete(k),
        _ => {
            // Euclidean distances between random points in the plane
            let pts: Vec<(f64, f64)> = (0..k).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
            let mut d = vec![0.0; k * k];
            for i in 0..k {
                for j in 0..k {
                    d[i * k + j] = ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt();
                }
            }
            ActionMetric::new(k, d).unwrap()
        }
    }
}

pub fn shapes() -> Vec<MlpSpec> {
    vec![
        MlpSpec::reward_net(4, &[8, 8], 4),
        MlpSpec::reward_net(3, &[5], 2),
        MlpSpec::policy_net(4, &[8, 8], 4),
        MlpSpec::policy_net(2, &[6], 5),
    ]
}

pub fn random_vec(n: usize, rng: &mut Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// `⟨c, f(x)⟩` for the network output `f`.
pub fn objective(net: &Mlp, x: &[f64], c: &[f64]) -> f64 {
    net.forward(x).unwrap().iter().zip(c).map(|(a, b)| a * b).sum()
}

pub fn central_difference(net: &Mlp, x: &[f64], c: &[f64], i: usize, h: f64) -> f64 {
    let mut plus = net.clone();
    plus.params_mut()[i] += h;
    let mut minus = net.clone();
    minus.params_mut()[i] -= h;
    (objective(&plus, x, c) - objective(&minus, x, c)) / (2.0 * h)
}

/// Random distribution, sometimes sparse and sometimes sharply peaked.
pub fn random_probs(k: usize, rng: &mut Rng) -> Vec<f64> {
    let power = [1.0, 4.0, 12.0][rng.random_range(0..3)];
    let mut w: Vec<f64> = (0..k)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>().powf(power) })
        .collect();
    if w.iter().all(|v| *v == 0.0) {
        w[0] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

