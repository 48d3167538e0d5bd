//! Nine-number summaries of integer collections.
//!
//! Conventions: population moments, quartiles by linear interpolation
//! between closest ranks, Fisher skewness and excess kurtosis. Skewness and
//! kurtosis are 0 when fewer than three values are present or the
//! collection is constant; every field is 0 for an empty collection.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StatSummary {
    pub count: f64,
    pub min: f64,
    pub max: f64,
    pub std: f64,
    pub iqr: f64,
    pub mean: f64,
    pub median: f64,
    pub skew: f64,
    pub kurtosis: f64,
}

impl StatSummary {
    pub const FIELDS: [&'static str; 9] = ["count", "min", "max", "std", "iqr", "mean", "median", "skew", "kurtosis"];

    pub fn to_array(&self) -> [f64; 9] {
        [self.count, self.min, self.max, self.std, self.iqr, self.mean, self.median, self.skew, self.kurtosis]
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn describe_collection(values: &[i64]) -> StatSummary {
    if values.is_empty() {
        return StatSummary::default();
    }
    let mut sorted: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    // sum in sorted order so permutations give bit-identical results
    let mean = sorted.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in &sorted {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let std = libm::sqrt(m2);
    let (skew, kurtosis) =
        if sorted.len() < 3 || m2 == 0.0 { (0.0, 0.0) } else { (m3 / (m2 * std), m4 / (m2 * m2) - 3.0) };
    StatSummary {
        count: n,
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        std,
        iqr: quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25),
        mean: mean.clamp(sorted[0], sorted[sorted.len() - 1]),
        median: quantile_sorted(&sorted, 0.5),
        skew,
        kurtosis,
    }
}

/// Arbitrarily nested integer collection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nested {
    Value(i64),
    List(Vec<Nested>),
}

impl Nested {
    pub fn total(&self) -> i64 {
        match self {
            Nested::Value(v) => *v,
            Nested::List(items) => items.iter().map(Nested::total).sum(),
        }
    }
}

impl From<i64> for Nested {
    fn from(v: i64) -> Self {
        Nested::Value(v)
    }
}

impl<T: Into<Nested>> From<Vec<T>> for Nested {
    fn from(v: Vec<T>) -> Self {
        Nested::List(v.into_iter().map(Into::into).collect())
    }
}

/// Collapses one level of nesting: element `i` is the (recursive) sum of
/// inner collection `i`.
pub fn aggregate_nested(values: &[Nested]) -> Vec<i64> {
    values.iter().map(Nested::total).collect()
}

pub fn aggregate_lists(values: &[Vec<i64>]) -> Vec<i64> {
    values.iter().map(|inner| inner.iter().sum()).collect()
}
