//! Backpropagation against central finite differences.

use bion_core::estimator::nn::{Network, NnParams};
use bion_core::loss::LossSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-5;

/// Largest relative error over all parameters, `|a - n| / max(|a|, |n|, 1e-6)`.
pub fn max_relative_error(net: &Network, batch: &[&[f64]], targets: &[f64], loss: &LossSpec) -> f64 {
    let (_, g) = net.loss_and_gradient(batch, targets, loss);
    let analytic = g.flatten();
    let theta = net.parameters();
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for (i, a) in analytic.iter().enumerate() {
        let mut p = theta.clone();
        p[i] = theta[i] + EPS;
        probe.set_parameters(&p);
        let up = probe.loss_and_gradient(batch, targets, loss).0;
        p[i] = theta[i] - EPS;
        probe.set_parameters(&p);
        let down = probe.loss_and_gradient(batch, targets, loss).0;
        let numeric = (up - down) / (2.0 * EPS);
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    worst
}

fn small_params() -> NnParams {
    NnParams { hidden_layers: 2, hidden_units: 5, ..NnParams::default() }
}

#[test]
fn three_example_batch() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let net = Network::new(4, &small_params(), &mut rng);
    let xs: Vec<Vec<f64>> = (0..3).map(|_| (0..4).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let batch: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
    for loss in [LossSpec::SQUARED, LossSpec::shifted(-0.8), LossSpec::shifted(0.8)] {
        let err = max_relative_error(&net, &batch, &[0.2, 0.9, 0.5], &loss);
        assert!(err < 1e-4, "{loss:?}: {err}");
    }
}

#[test]
fn default_architecture_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net = Network::new(3, &NnParams::default(), &mut rng);
    let xs = [[0.3, -1.0, 2.0], [1.5, 0.2, -0.7], [-0.4, 0.9, 0.1]];
    let batch: Vec<&[f64]> = xs.iter().map(|x| x.as_slice()).collect();
    let err = max_relative_error(&net, &batch, &[0.1, 0.6, 0.95], &LossSpec::shifted(-0.8));
    assert!(err < 1e-4, "{err}");
}
