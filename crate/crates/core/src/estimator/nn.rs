//! Fully connected network: ReLU hidden layers, one sigmoid output unit.
//!
//! Inputs are standardized with statistics of the training set, which are
//! stored with the network. Training minimizes the batch-mean loss with
//! Adam on shuffled mini-batches.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::loss::LossSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NnParams {
    pub hidden_layers: usize,
    pub hidden_units: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for NnParams {
    fn default() -> Self {
        NnParams {
            hidden_layers: 5,
            hidden_units: 64,
            epochs: 200,
            batch_size: 32,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-7,
        }
    }
}

/// Dense layer, `weights` is `outputs x inputs` row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub input_mean: Vec<f64>,
    pub input_scale: Vec<f64>,
    /// Hidden layers followed by the output layer.
    pub layers: Vec<Layer>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `c (m x n) = a (m x k) * b^T` where `b` is `n x k` row-major.
fn matmul_bt(m: usize, k: usize, n: usize, a: &[f64], b: &[f64], c: &mut [f64]) {
    // SAFETY: slices hold m*k, n*k and m*n elements with the given strides.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            k as isize,
            1,
            b.as_ptr(),
            1,
            k as isize,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `c (m x n) = a (m x k) * b` where `b` is `k x n` row-major.
fn matmul(m: usize, k: usize, n: usize, a: &[f64], b: &[f64], c: &mut [f64]) {
    // SAFETY: as above.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            k as isize,
            1,
            b.as_ptr(),
            n as isize,
            1,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `c (m x n) = a^T * b` where `a` is `k x m` and `b` is `k x n`, row-major.
fn matmul_at(m: usize, k: usize, n: usize, a: &[f64], b: &[f64], c: &mut [f64]) {
    // SAFETY: as above.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            1,
            m as isize,
            b.as_ptr(),
            n as isize,
            1,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Per-layer gradients, same shapes as the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.bias) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }
}

/// Activations of one forward pass over a batch.
struct Trace {
    /// `acts[0]` is the standardized input, `acts[l + 1]` the output of layer
    /// `l` after its activation.
    acts: Vec<Vec<f64>>,
    /// Pre-activations per layer.
    pre: Vec<Vec<f64>>,
}

impl Network {
    pub fn new(n_inputs: usize, params: &NnParams, rng: &mut impl Rng) -> Self {
        let mut sizes = vec![n_inputs];
        sizes.extend(core::iter::repeat_n(params.hidden_units, params.hidden_layers));
        sizes.push(1);
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (i, o) = (w[0], w[1]);
                // Glorot uniform
                let limit = libm::sqrt(6.0 / (i + o) as f64);
                Layer {
                    inputs: i,
                    outputs: o,
                    weights: (0..i * o).map(|_| rng.random_range(-limit..limit)).collect(),
                    bias: vec![0.0; o],
                }
            })
            .collect();
        Network { input_mean: vec![0.0; n_inputs], input_scale: vec![1.0; n_inputs], layers }
    }

    pub fn n_parameters(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_parameters());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_parameters(&mut self, flat: &[f64]) {
        let mut at = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&flat[at..at + nw]);
            at += nw;
            let nb = l.bias.len();
            l.bias.copy_from_slice(&flat[at..at + nb]);
            at += nb;
        }
    }

    fn standardize(&self, x: &[f64], out: &mut [f64]) {
        for ((o, v), (m, s)) in out.iter_mut().zip(x).zip(self.input_mean.iter().zip(&self.input_scale)) {
            *o = (v - m) / s;
        }
    }

    fn forward(&self, batch: &[&[f64]]) -> Trace {
        let m = batch.len();
        let d = self.input_mean.len();
        let mut input = vec![0.0; m * d];
        for (row, x) in input.chunks_exact_mut(d).zip(batch) {
            self.standardize(x, row);
        }
        let mut acts = vec![input];
        let mut pre = Vec::with_capacity(self.layers.len());
        let last = self.layers.len() - 1;
        for (li, layer) in self.layers.iter().enumerate() {
            let mut z = vec![0.0; m * layer.outputs];
            matmul_bt(m, layer.inputs, layer.outputs, &acts[li], &layer.weights, &mut z);
            for row in z.chunks_exact_mut(layer.outputs) {
                for (v, b) in row.iter_mut().zip(&layer.bias) {
                    *v += b;
                }
            }
            let a: Vec<f64> = if li == last {
                z.iter().map(|&v| sigmoid(v)).collect()
            } else {
                z.iter().map(|&v| v.max(0.0)).collect()
            };
            pre.push(z);
            acts.push(a);
        }
        Trace { acts, pre }
    }

    /// Network output in `(0, 1)`.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let t = self.forward(&[x]);
        t.acts[t.acts.len() - 1][0]
    }

    /// Mean loss over the batch and its gradient with respect to every
    /// weight and bias.
    pub fn loss_and_gradient(&self, batch: &[&[f64]], targets: &[f64], loss: &LossSpec) -> (f64, Gradients) {
        let m = batch.len();
        let t = self.forward(batch);
        let out = &t.acts[t.acts.len() - 1];
        let mf = m as f64;
        let mut value = 0.0;
        // dL/dz at the output unit
        let mut delta: Vec<f64> = out
            .iter()
            .zip(targets)
            .map(|(&p, &y)| {
                let r = p - y;
                value += loss.value(r);
                loss.gradient(r) / mf * p * (1.0 - p)
            })
            .collect();
        value /= mf;

        let n_layers = self.layers.len();
        let mut gw = vec![Vec::new(); n_layers];
        let mut gb = vec![Vec::new(); n_layers];
        for li in (0..n_layers).rev() {
            let layer = &self.layers[li];
            let mut w = vec![0.0; layer.outputs * layer.inputs];
            matmul_at(layer.outputs, m, layer.inputs, &delta, &t.acts[li], &mut w);
            let mut b = vec![0.0; layer.outputs];
            for row in delta.chunks_exact(layer.outputs) {
                for (acc, v) in b.iter_mut().zip(row) {
                    *acc += v;
                }
            }
            gw[li] = w;
            gb[li] = b;
            if li > 0 {
                let mut prev = vec![0.0; m * layer.inputs];
                matmul(m, layer.outputs, layer.inputs, &delta, &layer.weights, &mut prev);
                for (g, &z) in prev.iter_mut().zip(&t.pre[li - 1]) {
                    if z <= 0.0 {
                        *g = 0.0;
                    }
                }
                delta = prev;
            }
        }
        (value, Gradients { weights: gw, bias: gb })
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

pub(crate) fn fit(xs: &[&[f64]], ys: &[f64], loss: &LossSpec, params: &NnParams, seed: u64) -> Network {
    let n = xs.len();
    let d = xs.first().map_or(0, |x| x.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Network::new(d, params, &mut rng);
    let nf = n as f64;
    for j in 0..d {
        let mean = xs.iter().map(|x| x[j]).sum::<f64>() / nf;
        let var = xs.iter().map(|x| (x[j] - mean) * (x[j] - mean)).sum::<f64>() / nf;
        let sd = libm::sqrt(var);
        net.input_mean[j] = mean;
        net.input_scale[j] = if sd > 0.0 { sd } else { 1.0 };
    }

    let mut params_flat = net.parameters();
    let mut adam = Adam { m: vec![0.0; params_flat.len()], v: vec![0.0; params_flat.len()], step: 0 };
    let mut order: Vec<usize> = (0..n).collect();
    let batch_size = params.batch_size.max(1);
    let mut batch_x: Vec<&[f64]> = Vec::with_capacity(batch_size);
    let mut batch_y: Vec<f64> = Vec::with_capacity(batch_size);

    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch_size) {
            batch_x.clear();
            batch_y.clear();
            for &i in chunk {
                batch_x.push(xs[i]);
                batch_y.push(ys[i]);
            }
            let (_, grads) = net.loss_and_gradient(&batch_x, &batch_y, loss);
            adam.step += 1;
            let bc1 = 1.0 - libm::pow(params.beta1, f64::from(adam.step));
            let bc2 = 1.0 - libm::pow(params.beta2, f64::from(adam.step));
            let lr = params.learning_rate * libm::sqrt(bc2) / bc1;
            let mut at = 0;
            for (w, b) in grads.weights.iter().zip(&grads.bias) {
                for &g in w.iter().chain(b) {
                    let m = &mut adam.m[at];
                    let v = &mut adam.v[at];
                    *m = params.beta1 * *m + (1.0 - params.beta1) * g;
                    *v = params.beta2 * *v + (1.0 - params.beta2) * g * g;
                    params_flat[at] -= lr * *m / (libm::sqrt(*v) + params.epsilon);
                    at += 1;
                }
            }
            net.set_parameters(&params_flat);
        }
    }
    net
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut net = Network::new(3, &NnParams::default(), &mut rng);
        assert_eq!(net.n_parameters(), 3 * 64 + 64 + 4 * (64 * 64 + 64) + 64 + 1);
        let mut p = net.parameters();
        p[5] += 1.0;
        net.set_parameters(&p);
        assert_eq!(net.parameters(), p);
    }

    #[test]
    fn fits_a_simple_trend() {
        let xs: Vec<Vec<f64>> = (0..64).map(|i| vec![i as f64 / 8.0, ((i * 3) % 7) as f64]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.1 + 0.08 * x[0]).collect();
        let refs: Vec<&[f64]> = xs.iter().map(|x| x.as_slice()).collect();
        let params = NnParams { epochs: 150, ..NnParams::default() };
        let net = fit(&refs, &ys, &LossSpec::SQUARED, &params, 3);
        let mse: f64 =
            refs.iter().zip(&ys).map(|(x, y)| (net.predict(x) - y) * (net.predict(x) - y)).sum::<f64>() / 64.0;
        assert!(mse < 1e-3, "mse {mse}");
    }
}
