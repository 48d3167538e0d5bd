//! Ordinary least squares with a vanishing ridge term.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Ridge added to the standardized normal equations; only there to make
/// collinear feature sets solvable.
pub const RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

pub(crate) fn fit(xs: &[&[f64]], ys: &[f64]) -> LinearModel {
    let n = xs.len();
    let d = xs.first().map_or(0, |x| x.len());
    let nf = n as f64;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let mean: Vec<f64> = (0..d).map(|j| xs.iter().map(|x| x[j]).sum::<f64>() / nf).collect();
    let scale: Vec<f64> = (0..d)
        .map(|j| {
            let var = xs.iter().map(|x| (x[j] - mean[j]) * (x[j] - mean[j])).sum::<f64>() / nf;
            let s = libm::sqrt(var);
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();

    // normal equations on standardized, centred data
    let mut gram = vec![0.0; d * d];
    let mut rhs = vec![0.0; d];
    let mut z = vec![0.0; d];
    for (x, &y) in xs.iter().zip(ys) {
        for j in 0..d {
            z[j] = (x[j] - mean[j]) / scale[j];
        }
        for a in 0..d {
            rhs[a] += z[a] * (y - y_mean);
            for b in 0..=a {
                gram[a * d + b] += z[a] * z[b];
            }
        }
    }
    for a in 0..d {
        gram[a * d + a] += RIDGE * nf;
        for b in 0..a {
            gram[b * d + a] = gram[a * d + b];
        }
    }
    let beta = cholesky_solve(&mut gram, &mut rhs, d);

    let weights: Vec<f64> = beta.iter().zip(&scale).map(|(b, s)| b / s).collect();
    let intercept = y_mean - weights.iter().zip(&mean).map(|(w, m)| w * m).sum::<f64>();
    LinearModel { weights, intercept }
}

/// Solves `A x = b` for symmetric positive definite `A` (row-major, `d x d`),
/// overwriting both inputs.
fn cholesky_solve(a: &mut [f64], b: &mut [f64], d: usize) -> Vec<f64> {
    for j in 0..d {
        let mut diag = a[j * d + j];
        for k in 0..j {
            diag -= a[j * d + k] * a[j * d + k];
        }
        let l_jj = libm::sqrt(diag.max(f64::MIN_POSITIVE));
        a[j * d + j] = l_jj;
        for i in j + 1..d {
            let mut v = a[i * d + j];
            for k in 0..j {
                v -= a[i * d + k] * a[j * d + k];
            }
            a[i * d + j] = v / l_jj;
        }
    }
    // forward: L y = b
    for i in 0..d {
        let mut v = b[i];
        for k in 0..i {
            v -= a[i * d + k] * b[k];
        }
        b[i] = v / a[i * d + i];
    }
    // backward: L^T x = y
    for i in (0..d).rev() {
        let mut v = b[i];
        for k in i + 1..d {
            v -= a[k * d + i] * b[k];
        }
        b[i] = v / a[i * d + i];
    }
    b.to_vec()
}
