//! Estimation-quality metrics.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::estimator::BoundaryEstimate;
use crate::model::Sense;

pub fn admissible(est: &BoundaryEstimate, z_opt: i64) -> bool {
    est.contains(z_opt)
}

/// Reduction of the distance between the cutting boundary and the optimum,
/// in percent. `None` when the original cutting bound already equals the
/// optimum.
pub fn gap_reduction(est: &BoundaryEstimate, z_opt: i64, lb: i64, ub: i64, sense: Sense) -> Option<f64> {
    let (cut_est, cut_orig) = match sense {
        Sense::Minimize => (est.est_ub, ub),
        Sense::Maximize => (est.est_lb, lb),
    };
    let denom = (cut_orig as i128 - z_opt as i128).abs();
    if denom == 0 {
        return None;
    }
    let num = (cut_est as i128 - z_opt as i128).abs();
    Some(percent_of_complement(num, denom))
}

/// Reduction of the domain width in percent; `None` for a single-point
/// original domain.
pub fn size_reduction(est: &BoundaryEstimate, lb: i64, ub: i64) -> Option<f64> {
    let denom = (ub as i128 - lb as i128).abs();
    if denom == 0 {
        return None;
    }
    let num = (est.est_ub as i128 - est.est_lb as i128).abs();
    Some(percent_of_complement(num, denom))
}

// (1 - num/denom) * 100 computed as (denom - num) * 100 / denom so that exact
// ratios stay exact.
fn percent_of_complement(num: i128, denom: i128) -> f64 {
    ((denom - num) * 100) as f64 / denom as f64
}

/// Median with the mean of the two middle values for even counts. NaN for an
/// empty input.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Median absolute deviation from the median, unscaled.
pub fn mad(values: &[f64]) -> f64 {
    let m = median(values);
    let dev: Vec<f64> = values.iter().map(|x| (x - m).abs()).collect();
    median(&dev)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedMad {
    pub median: f64,
    pub mad: f64,
}

impl MedMad {
    pub fn of(values: &[f64]) -> Self {
        MedMad { median: median(values), mad: mad(values) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationMetrics {
    pub admissible_pct: MedMad,
    pub gap_pct: MedMad,
    pub size_pct: MedMad,
    /// Instance evaluations left out of the gap or size aggregate.
    pub n_excluded: usize,
    pub n_evaluated: usize,
}
