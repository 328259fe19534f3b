mod common;

use ndarray::Array2;
use rand::Rng as _;
use tsil::imitation::{solve_transport, wasserstein_logit_gradient, ActionMetric, GradientMode};
use tsil::neural::Mlp;
use tsil::policy::softmax;
use tsil::RngSeed;

use common::*;

#[test]
fn backprop_matches_finite_differences() {
    for seed in 0..20 {
        for spec in shapes() {
            let mut rng = RngSeed(seed).rng();
            let net = Mlp::new(spec.clone(), &mut rng).unwrap();
            let x = random_vec(spec.input_dim, &mut rng);
            let c = random_vec(spec.output_dim, &mut rng);
            let g = net.backward(&x, &c).unwrap();
            for (i, gi) in g.iter().enumerate() {
                let fd = central_difference(&net, &x, &c, i, 1e-5);
                // a relu kink between ±h would show up as a gross mismatch
                assert!(
                    (gi - fd).abs() <= f64::max(1e-4, 1e-3 * gi.abs()),
                    "seed {seed} {spec:?} param {i}: {gi} vs {fd}"
                );
            }
        }
    }
}

#[test]
fn batch_gradient_is_sum_of_rows() {
    let mut rng = RngSeed(7).rng();
    for spec in shapes() {
        let net = Mlp::new(spec.clone(), &mut rng).unwrap();
        let n = 6;
        let xs = Array2::from_shape_fn((n, spec.input_dim), |_| rng.random_range(-1.0..1.0));
        let dz = Array2::from_shape_fn((n, spec.output_dim), |_| rng.random_range(-1.0..1.0));
        let trace = net.forward_batch(xs.view()).unwrap();
        let mut batch = vec![0.0; net.n_params()];
        net.backward_batch(&trace, dz.clone(), &mut batch);
        let mut rows = vec![0.0; net.n_params()];
        for r in 0..n {
            let x = xs.row(r).to_vec();
            net.backward_logits(&x, dz.row(r).as_slice().unwrap(), &mut rows).unwrap();
            let logits = net.logits(&x).unwrap();
            for (a, b) in logits.iter().zip(trace.logits().row(r)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        for (a, b) in batch.iter().zip(&rows) {
            assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()));
        }
    }
}

#[test]
fn cross_entropy_logit_gradient() {
    // d/dz of −Σ p log softmax(z) is softmax(z) − p
    let mut rng = RngSeed(8).rng();
    for _ in 0..50 {
        let k = rng.random_range(2..8);
        let z = random_vec(k, &mut rng);
        let p = softmax(&random_vec(k, &mut rng));
        let loss = |z: &[f64]| -> f64 { -softmax(z).iter().zip(&p).map(|(q, p)| p * q.ln()).sum::<f64>() };
        let pi = softmax(&z);
        for j in 0..k {
            let mut zp = z.clone();
            zp[j] += 1e-6;
            let mut zm = z.clone();
            zm[j] -= 1e-6;
            let fd = (loss(&zp) - loss(&zm)) / 2e-6;
            assert!((fd - (pi[j] - p[j])).abs() < 1e-7);
        }
    }
}

#[test]
fn wasserstein_logit_gradient_matches_finite_differences() {
    // W₁(p, softmax(z)) is piecewise smooth in z; away from kinks the exact
    // score-function gradient is its derivative
    let mut rng = RngSeed(9).rng();
    let mut checked = 0;
    for _ in 0..200 {
        let k = rng.random_range(2..7);
        let metric = ActionMetric::line(k);
        let p = softmax(&random_vec(k, &mut rng));
        let z: Vec<f64> = random_vec(k, &mut rng).iter().map(|v| 2.0 * v).collect();
        let w = |z: &[f64]| solve_transport(&p, &softmax(z), &metric).unwrap().value;
        let (g, _) =
            wasserstein_logit_gradient(&p, &softmax(&z), &metric, GradientMode::Exact, 1, true, &mut rng).unwrap();
        let h = 1e-6;
        let mut smooth = true;
        let mut fd = vec![0.0; k];
        for j in 0..k {
            let mut zp = z.clone();
            zp[j] += h;
            let mut zm = z.clone();
            zm[j] -= h;
            let (wp, w0, wm) = (w(&zp), w(&z), w(&zm));
            // one-sided slopes disagree at a kink
            if ((wp - w0) - (w0 - wm)).abs() > 1e-9 {
                smooth = false;
            }
            fd[j] = (wp - wm) / (2.0 * h);
        }
        if !smooth {
            continue;
        }
        checked += 1;
        for j in 0..k {
            assert!((g[j] - fd[j]).abs() < 1e-6, "{g:?} vs {fd:?}");
        }
    }
    assert!(checked > 100, "only {checked} smooth points");
}
