use ndarray::{linalg::general_mat_mul, Array2, ArrayView2, ArrayViewMut2, Axis};
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;
use crate::policy::softmax;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the activation output `a`.
    #[inline]
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputHead {
    Linear,
    Softmax,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub activation: Activation,
    pub output_dim: usize,
    pub output_head: OutputHead,
}

impl MlpSpec {
    /// Multi-output reward regressor: ReLU hidden layers, linear outputs.
    pub fn reward_net(input_dim: usize, hidden: &[usize], n_actions: usize) -> Self {
        MlpSpec {
            input_dim,
            hidden: hidden.to_vec(),
            activation: Activation::Relu,
            output_dim: n_actions,
            output_head: OutputHead::Linear,
        }
    }

    /// Policy network: tanh hidden layers, softmax outputs.
    pub fn policy_net(input_dim: usize, hidden: &[usize], n_actions: usize) -> Self {
        MlpSpec {
            input_dim,
            hidden: hidden.to_vec(),
            activation: Activation::Tanh,
            output_dim: n_actions,
            output_head: OutputHead::Softmax,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.output_dim == 0 || self.hidden.contains(&0) {
            return Err(Error::Invalid(format!("network dimensions must be >= 1: {self:?}")));
        }
        Ok(())
    }

    fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden.len() + 2);
        w.push(self.input_dim);
        w.extend_from_slice(&self.hidden);
        w.push(self.output_dim);
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct LayerLayout {
    n_in: usize,
    n_out: usize,
    /// Offset of the `n_out x n_in` row-major weight block.
    w: usize,
    /// Offset of the bias vector.
    b: usize,
}

/// Network parameters live in one flat vector; gradients share the layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    spec: MlpSpec,
    layers: Vec<LayerLayout>,
    params: Vec<f64>,
}

/// Per-layer activations of a minibatch, kept for the backward pass.
pub struct BatchTrace {
    /// `activations[0]` is the input; `activations[l + 1]` is the output of
    /// layer `l` after its nonlinearity (logits for the last layer).
    activations: Vec<Array2<f64>>,
}

impl BatchTrace {
    pub fn logits(&self) -> &Array2<f64> {
        self.activations.last().expect("non-empty trace")
    }

    pub fn batch_size(&self) -> usize {
        self.activations[0].nrows()
    }
}

impl Mlp {
    pub fn zeros(spec: MlpSpec) -> Result<Self> {
        spec.validate()?;
        let widths = spec.widths();
        let mut layers = Vec::with_capacity(widths.len() - 1);
        let mut off = 0;
        for win in widths.windows(2) {
            let (n_in, n_out) = (win[0], win[1]);
            layers.push(LayerLayout {
                n_in,
                n_out,
                w: off,
                b: off + n_in * n_out,
            });
            off += n_in * n_out + n_out;
        }
        Ok(Mlp {
            spec,
            layers,
            params: vec![0.0; off],
        })
    }

    /// Glorot-uniform weights for tanh layers, He-normal for ReLU layers,
    /// zero biases.
    pub fn new(spec: MlpSpec, rng: &mut Rng) -> Result<Self> {
        let mut net = Self::zeros(spec)?;
        for l in net.layers.clone() {
            let w = &mut net.params[l.w..l.w + l.n_in * l.n_out];
            match net.spec.activation {
                Activation::Tanh => {
                    let r = (6.0 / (l.n_in + l.n_out) as f64).sqrt();
                    for v in w.iter_mut() {
                        *v = rng.random_range(-r..r);
                    }
                }
                Activation::Relu => {
                    let normal = Normal::new(0.0, (2.0 / l.n_in as f64).sqrt()).expect("finite std");
                    for v in w.iter_mut() {
                        *v = normal.sample(rng);
                    }
                }
            }
        }
        Ok(net)
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn input_dim(&self) -> usize {
        self.spec.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.spec.output_dim
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Width of the last hidden layer (the input width when there is none).
    pub fn feature_dim(&self) -> usize {
        self.layers.last().map(|l| l.n_in).unwrap_or(self.spec.input_dim)
    }

    fn weights(&self, l: &LayerLayout) -> &[f64] {
        &self.params[l.w..l.w + l.n_in * l.n_out]
    }

    fn bias(&self, l: &LayerLayout) -> &[f64] {
        &self.params[l.b..l.b + l.n_out]
    }

    /// Sets layer `index`'s weights (row-major `n_out x n_in`) and biases.
    pub fn set_layer(&mut self, index: usize, weights: &[f64], bias: &[f64]) -> Result<()> {
        let l = *self
            .layers
            .get(index)
            .ok_or_else(|| Error::Invalid(format!("no layer {index}")))?;
        check_dim(l.n_in * l.n_out, weights.len())?;
        check_dim(l.n_out, bias.len())?;
        self.params[l.w..l.w + weights.len()].copy_from_slice(weights);
        self.params[l.b..l.b + bias.len()].copy_from_slice(bias);
        Ok(())
    }

    fn affine(&self, l: &LayerLayout, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        let w = self.weights(l);
        let b = self.bias(l);
        for o in 0..l.n_out {
            out.push(dot(&w[o * l.n_in..(o + 1) * l.n_in], input) + b[o]);
        }
    }

    /// All post-activation layer outputs for one input; the last entry holds
    /// the logits (pre-head).
    fn trace(&self, input: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(input.to_vec());
        let last = self.layers.len() - 1;
        for (i, l) in self.layers.iter().enumerate() {
            let mut z = Vec::with_capacity(l.n_out);
            self.affine(l, &acts[i], &mut z);
            if i < last {
                for v in &mut z {
                    *v = self.spec.activation.apply(*v);
                }
            }
            acts.push(z);
        }
        acts
    }

    /// Pre-head outputs.
    pub fn logits(&self, input: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.spec.input_dim, input.len())?;
        let last = self.layers.len() - 1;
        let mut cur = input.to_vec();
        let mut next = Vec::new();
        for (i, l) in self.layers.iter().enumerate() {
            self.affine(l, &cur, &mut next);
            if i < last {
                for v in &mut next {
                    *v = self.spec.activation.apply(*v);
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        let z = self.logits(input)?;
        Ok(match self.spec.output_head {
            OutputHead::Linear => z,
            OutputHead::Softmax => softmax(&z),
        })
    }

    /// Output of the last hidden layer.
    pub fn features(&self, input: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.spec.input_dim, input.len())?;
        let acts = self.trace(input);
        Ok(acts[acts.len() - 2].clone())
    }

    /// Gradient of `⟨cotangent, forward(input)⟩` with respect to every
    /// parameter. For a softmax head the cotangent is taken with respect to
    /// the probabilities.
    pub fn backward(&self, input: &[f64], output_cotangent: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.spec.input_dim, input.len())?;
        check_dim(self.spec.output_dim, output_cotangent.len())?;
        let acts = self.trace(input);
        let dlogits = match self.spec.output_head {
            OutputHead::Linear => output_cotangent.to_vec(),
            OutputHead::Softmax => {
                let p = softmax(acts.last().expect("logits"));
                softmax_vjp(&p, output_cotangent)
            }
        };
        let mut grad = vec![0.0; self.params.len()];
        self.backward_from_trace(&acts, dlogits, &mut grad);
        Ok(grad)
    }

    /// Gradient with the cotangent given directly at the logits.
    pub fn backward_logits(&self, input: &[f64], dlogits: &[f64], grad: &mut [f64]) -> Result<()> {
        check_dim(self.spec.input_dim, input.len())?;
        check_dim(self.spec.output_dim, dlogits.len())?;
        check_dim(self.params.len(), grad.len())?;
        let acts = self.trace(input);
        self.backward_from_trace(&acts, dlogits.to_vec(), grad);
        Ok(())
    }

    fn backward_from_trace(&self, acts: &[Vec<f64>], mut delta: Vec<f64>, grad: &mut [f64]) {
        for (i, l) in self.layers.iter().enumerate().rev() {
            let a_in = &acts[i];
            for o in 0..l.n_out {
                let d = delta[o];
                grad[l.b + o] += d;
                if d != 0.0 {
                    let gw = &mut grad[l.w + o * l.n_in..l.w + (o + 1) * l.n_in];
                    for (g, a) in gw.iter_mut().zip(a_in) {
                        *g += d * a;
                    }
                }
            }
            if i == 0 {
                break;
            }
            let w = self.weights(l);
            let mut prev = vec![0.0; l.n_in];
            for o in 0..l.n_out {
                let d = delta[o];
                if d != 0.0 {
                    for (p, wv) in prev.iter_mut().zip(&w[o * l.n_in..(o + 1) * l.n_in]) {
                        *p += d * wv;
                    }
                }
            }
            for (p, a) in prev.iter_mut().zip(a_in) {
                *p *= self.spec.activation.derivative_from_output(*a);
            }
            delta = prev;
        }
    }

    /// Forward pass over a row-major minibatch (`n x input_dim`).
    pub fn forward_batch(&self, inputs: ArrayView2<'_, f64>) -> Result<BatchTrace> {
        check_dim(self.spec.input_dim, inputs.ncols())?;
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(inputs.to_owned());
        let last = self.layers.len() - 1;
        for (i, l) in self.layers.iter().enumerate() {
            let w = ArrayView2::from_shape((l.n_out, l.n_in), self.weights(l)).expect("layout");
            let mut z = activations[i].dot(&w.t());
            let b = ndarray::ArrayView1::from(self.bias(l));
            z += &b;
            if i < last {
                let act = self.spec.activation;
                z.mapv_inplace(|v| act.apply(v));
            }
            activations.push(z);
        }
        Ok(BatchTrace { activations })
    }

    /// Accumulates the minibatch gradient into `grad` given cotangents at the
    /// logits (`n x output_dim`).
    pub fn backward_batch(&self, trace: &BatchTrace, dlogits: Array2<f64>, grad: &mut [f64]) {
        assert_eq!(grad.len(), self.params.len());
        let mut delta = dlogits;
        for (i, l) in self.layers.iter().enumerate().rev() {
            let a_in = &trace.activations[i];
            {
                let (head, tail) = grad.split_at_mut(l.b);
                let mut gw = ArrayViewMut2::from_shape((l.n_out, l.n_in), &mut head[l.w..l.w + l.n_in * l.n_out])
                    .expect("layout");
                general_mat_mul(1.0, &delta.t(), a_in, 1.0, &mut gw);
                let db = delta.sum_axis(Axis(0));
                for (g, d) in tail[..l.n_out].iter_mut().zip(db.iter()) {
                    *g += d;
                }
            }
            if i == 0 {
                break;
            }
            let w = ArrayView2::from_shape((l.n_out, l.n_in), self.weights(l)).expect("layout");
            let mut prev = delta.dot(&w);
            let act = self.spec.activation;
            ndarray::Zip::from(&mut prev)
                .and(a_in)
                .for_each(|p, &a| *p *= act.derivative_from_output(a));
            delta = prev;
        }
    }
}

/// `Jᵀ c` for the softmax Jacobian `J = diag(p) − p pᵀ`.
pub(crate) fn softmax_vjp(p: &[f64], c: &[f64]) -> Vec<f64> {
    let mean: f64 = p.iter().zip(c).map(|(pi, ci)| pi * ci).sum();
    p.iter().zip(c).map(|(pi, ci)| pi * (ci - mean)).collect()
}
