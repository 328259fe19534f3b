mod common;

use rand::Rng as _;
use tsil::imitation::{solve_kantorovich_dual, solve_transport, ActionMetric};
use tsil::{ActionDistribution, RngSeed};

use common::*;

#[test]
fn primal_lp_equals_dual_value() {
    let mut rng = RngSeed(21).rng();
    for _ in 0..500 {
        let k = rng.random_range(1..=8);
        let p = random_distribution(k, &mut rng);
        let q = random_distribution(k, &mut rng);
        let metric = random_metric(k, &mut rng);
        let sol = solve_kantorovich_dual(&p, &q, &metric).unwrap();
        let lp = lp_w1(p.probs(), q.probs(), &metric);
        assert!((sol.value - lp).abs() < 1e-8, "k={k}: {} vs {lp}", sol.value);
        let dual_value = sol.potential.gap(p.probs(), q.probs());
        assert!((dual_value - lp).abs() < 1e-8);
        assert!(sol.potential.max_lipschitz_violation(&metric) < 1e-9);
    }
}

#[test]
fn plan_is_feasible_and_attains_the_value() {
    let mut rng = RngSeed(22).rng();
    for _ in 0..200 {
        let k = rng.random_range(1..=8);
        let p = random_distribution(k, &mut rng);
        let q = random_distribution(k, &mut rng);
        let metric = random_metric(k, &mut rng);
        let sol = solve_transport(p.probs(), q.probs(), &metric).unwrap();
        let mut cost = 0.0;
        for i in 0..k {
            let row: f64 = (0..k).map(|j| sol.plan[i * k + j]).sum();
            let col: f64 = (0..k).map(|j| sol.plan[j * k + i]).sum();
            assert!((row - p.probs()[i]).abs() < 1e-12 && (col - q.probs()[i]).abs() < 1e-12);
            for j in 0..k {
                assert!(sol.plan[i * k + j] >= -1e-15);
                cost += sol.plan[i * k + j] * metric.get(i, j);
            }
        }
        assert!((cost - sol.value).abs() < 1e-12);
    }
}

#[test]
fn point_masses_cost_exactly_their_distance() {
    let mut rng = RngSeed(23).rng();
    for _ in 0..100 {
        let k = rng.random_range(2..=8);
        let metric = random_metric(k, &mut rng);
        let (a, b) = (rng.random_range(0..k), rng.random_range(0..k));
        let p = ActionDistribution::one_hot(k, tsil::ActionId(a));
        let q = ActionDistribution::one_hot(k, tsil::ActionId(b));
        assert_eq!(solve_kantorovich_dual(&p, &q, &metric).unwrap().value, metric.get(a, b));
    }
}

#[test]
fn line_metric_matches_cdf_formula() {
    // on 0, 1, …, k−1 the distance is Σ |F_p − F_q| over the first k−1 cut points
    let mut rng = RngSeed(24).rng();
    for _ in 0..200 {
        let k = rng.random_range(2..=12);
        let p = random_distribution(k, &mut rng);
        let q = random_distribution(k, &mut rng);
        let (mut fp, mut fq, mut expect) = (0.0, 0.0, 0.0);
        for i in 0..k - 1 {
            fp += p.probs()[i];
            fq += q.probs()[i];
            expect += (fp - fq).abs();
        }
        let got = solve_kantorovich_dual(&p, &q, &ActionMetric::line(k)).unwrap().value;
        assert!((got - expect).abs() < 1e-12);
    }
}

#[test]
fn larger_instances_terminate() {
    let mut rng = RngSeed(25).rng();
    for k in [20, 50] {
        let p = random_distribution(k, &mut rng);
        let q = random_distribution(k, &mut rng);
        let metric = random_metric(k, &mut rng);
        let sol = solve_kantorovich_dual(&p, &q, &metric).unwrap();
        assert!(sol.potential.max_lipschitz_violation(&metric) < 1e-9);
        assert!((sol.potential.gap(p.probs(), q.probs()) - sol.value).abs() < 1e-9);
    }
}
