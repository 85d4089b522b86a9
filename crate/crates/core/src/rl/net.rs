//! Fully-connected Q-network with hand-rolled forward and backward passes.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::env::Action;

use super::RlError;

/// Size of the action-value output.
pub const N_ACTIONS: usize = 3;

/// Global-norm ceiling applied to every gradient batch.
pub const GRAD_CLIP_NORM: f64 = 10.0;

/// ReLU MLP, linear output. The default architecture is
/// `[obs_dim, 64, 64, 3]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork {
    dims: Vec<usize>,
    /// Row-major per layer: `weights[l][row * in_dim + col]`, row = output.
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

impl QNetwork {
    /// Standard architecture: two hidden layers of 64 units.
    pub fn new(obs_dim: usize, seed: u64) -> Self {
        Self::with_dims(&[obs_dim, 64, 64, N_ACTIONS], seed)
    }

    /// Arbitrary layer sizes; the output dimension must be the action count.
    pub fn with_dims(dims: &[usize], seed: u64) -> Self {
        assert!(dims.len() >= 2, "network needs at least one layer");
        assert_eq!(*dims.last().unwrap(), N_ACTIONS, "output dimension must be {N_ACTIONS}");
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        let n_layers = dims.len() - 1;
        for (l, pair) in dims.windows(2).enumerate() {
            let (n_in, n_out) = (pair[0], pair[1]);
            // He-style uniform fan-in scaling for the ReLU stack.
            let limit = (6.0 / n_in as f64).sqrt();
            let w: Vec<f64> = (0..n_in * n_out)
                .map(|_| rng.random_range(-limit..limit))
                .collect();
            weights.push(w);
            // Slightly positive hidden biases keep fresh units off the ReLU
            // kink (and alive); the linear output layer starts at zero.
            let b = if l + 1 < n_layers { 0.01 } else { 0.0 };
            biases.push(vec![b; n_out]);
        }
        Self { dims: dims.to_vec(), weights, biases }
    }

    pub fn from_parts(dims: Vec<usize>, weights: Vec<Vec<f64>>, biases: Vec<Vec<f64>>) -> Self {
        Self { dims, weights, biases }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn obs_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn params_mut(&mut self) -> (&mut Vec<Vec<f64>>, &mut Vec<Vec<f64>>) {
        (&mut self.weights, &mut self.biases)
    }

    fn check_dim(&self, obs: &[f64]) -> Result<(), RlError> {
        if obs.len() != self.dims[0] {
            return Err(RlError::DimensionMismatch { expected: self.dims[0], got: obs.len() });
        }
        Ok(())
    }

    /// Deterministic affine/ReLU stack; returns the action values.
    pub fn forward(&self, obs: &[f64]) -> Result<Vec<f64>, RlError> {
        self.check_dim(obs)?;
        let mut activ = obs.to_vec();
        for l in 0..self.n_layers() {
            activ = self.layer_forward(l, &activ, l + 1 < self.n_layers());
        }
        Ok(activ)
    }

    fn layer_forward(&self, l: usize, input: &[f64], relu: bool) -> Vec<f64> {
        let n_in = self.dims[l];
        let w = &self.weights[l];
        let mut out = self.biases[l].clone();
        for (row, o) in out.iter_mut().enumerate() {
            let w_row = &w[row * n_in..(row + 1) * n_in];
            let mut acc = 0.0;
            for (wi, xi) in w_row.iter().zip(input) {
                acc += wi * xi;
            }
            *o += acc;
            if relu && *o < 0.0 {
                *o = 0.0;
            }
        }
        out
    }

    /// Forward pass retaining post-activation values per layer (input first).
    fn forward_trace(&self, obs: &[f64]) -> Vec<Vec<f64>> {
        let mut trace = Vec::with_capacity(self.n_layers() + 1);
        trace.push(obs.to_vec());
        for l in 0..self.n_layers() {
            let next = self.layer_forward(l, trace.last().unwrap(), l + 1 < self.n_layers());
            trace.push(next);
        }
        trace
    }

    /// Greedy action; exact ties resolve to the lowest action index.
    pub fn greedy_action(&self, obs: &[f64]) -> Result<Action, RlError> {
        let q = self.forward(obs)?;
        Ok(argmax_action(&q))
    }
}

/// Lowest-index argmax over the action values.
pub fn argmax_action(q: &[f64]) -> Action {
    debug_assert_eq!(q.len(), N_ACTIONS);
    let mut best = 0usize;
    for i in 1..q.len() {
        if q[i] > q[best] {
            best = i;
        }
    }
    Action::from_index(best).expect("action index in range")
}

/// Parameter gradients, same shapes as the network.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &QNetwork) -> Self {
        Self {
            weights: net.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: net.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn global_norm(&self) -> f64 {
        let mut sq = 0.0;
        for w in &self.weights {
            for v in w {
                sq += v * v;
            }
        }
        for b in &self.biases {
            for v in b {
                sq += v * v;
            }
        }
        sq.sqrt()
    }

    fn scale(&mut self, factor: f64) {
        for w in &mut self.weights {
            for v in w.iter_mut() {
                *v *= factor;
            }
        }
        for b in &mut self.biases {
            for v in b.iter_mut() {
                *v *= factor;
            }
        }
    }
}

/// One sample of a training batch: observation and the action whose value is
/// regressed toward the target.
#[derive(Debug, Clone, Copy)]
pub struct BatchItem<'a> {
    pub obs: &'a [f64],
    pub action: usize,
}

/// Gradients of the mean squared error between `q(obs)[action]` and the
/// targets, clipped to a global norm of [`GRAD_CLIP_NORM`].
pub fn backward(net: &QNetwork, batch: &[BatchItem<'_>], targets: &[f64]) -> Gradients {
    assert!(!batch.is_empty(), "batch must be non-empty");
    assert_eq!(batch.len(), targets.len(), "one target per sample");
    let mut grads = Gradients::zeros_like(net);
    let scale = 1.0 / batch.len() as f64;
    let n_layers = net.n_layers();

    for (item, &target) in batch.iter().zip(targets) {
        let trace = net.forward_trace(item.obs);
        let output = trace.last().unwrap();
        // d(mean (q_a - y)^2)/dq = 2 (q_a - y) / B on the taken action only.
        let mut delta = vec![0.0; output.len()];
        delta[item.action] = 2.0 * (output[item.action] - target) * scale;

        for l in (0..n_layers).rev() {
            let input = &trace[l];
            let (n_in, n_out) = (net.dims[l], net.dims[l + 1]);
            let gw = &mut grads.weights[l];
            for row in 0..n_out {
                let d = delta[row];
                if d != 0.0 {
                    let gw_row = &mut gw[row * n_in..(row + 1) * n_in];
                    for (g, x) in gw_row.iter_mut().zip(input) {
                        *g += d * x;
                    }
                }
                grads.biases[l][row] += d;
            }
            if l > 0 {
                // Propagate through the weights and the ReLU mask of the
                // previous layer's post-activation.
                let w = &net.weights[l];
                let mut prev = vec![0.0; n_in];
                for (row, &d) in delta.iter().enumerate() {
                    if d != 0.0 {
                        let w_row = &w[row * n_in..(row + 1) * n_in];
                        for (p, wi) in prev.iter_mut().zip(w_row) {
                            *p += d * wi;
                        }
                    }
                }
                for (p, a) in prev.iter_mut().zip(input) {
                    if *a <= 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
    }

    let norm = grads.global_norm();
    if norm > GRAD_CLIP_NORM {
        grads.scale(GRAD_CLIP_NORM / norm);
    }
    grads
}
