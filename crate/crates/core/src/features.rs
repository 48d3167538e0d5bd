//! Fixed-size numeric descriptions of instances.
//!
//! A raw feature list has two parts. Instance parameters contribute one
//! feature per scalar and a nine-number summary per collection, with nested
//! collections summed down to one level first. The compiled model
//! contributes ten structural counts. A [`FeatureSchema`] fitted on a
//! training set drops features whose variance does not exceed a threshold.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::compile::compile;
use crate::error::{Error, Result};
use crate::hash::Fnv64;
use crate::model::{Constraint, FlatModel, Instance, ParamValue};
use crate::stats::{aggregate_lists, describe_collection, StatSummary};

pub const DEFAULT_VARIANCE_THRESHOLD: f64 = 1e-8;

pub const STAT_CONVENTION: &str = "population-moments;linear-interpolated-quartiles;fisher-skew;excess-kurtosis";

pub const MODEL_FEATURES: [&str; 10] = [
    "n_variables",
    "n_constraints",
    "n_linear",
    "n_disjunctions",
    "sum_domain_sizes",
    "mean_domain_size",
    "max_domain_size",
    "objective_domain_width",
    "constraints_per_variable",
    "mean_constraint_arity",
];

/// Named features before low-variance filtering.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RawFeatures {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl RawFeatures {
    fn push(&mut self, name: String, value: f64) {
        self.names.push(name);
        self.values.push(value);
    }

    fn push_summary(&mut self, prefix: &str, s: &StatSummary) {
        for (field, v) in StatSummary::FIELDS.iter().zip(s.to_array()) {
            self.push(format!("{prefix}.{field}"), v);
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn extend(&mut self, other: RawFeatures) {
        self.names.extend(other.names);
        self.values.extend(other.values);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn instance_features(instance: &Instance) -> RawFeatures {
    let mut out = RawFeatures::default();
    for (name, value) in &instance.params {
        match value {
            ParamValue::Int(v) => out.push(name.clone(), *v as f64),
            ParamValue::List(v) => out.push_summary(name, &describe_collection(v)),
            ParamValue::Nested(v) => out.push_summary(name, &describe_collection(&aggregate_lists(v))),
        }
    }
    out
}

pub fn model_features(model: &FlatModel) -> RawFeatures {
    let n_vars = model.variables.len() as f64;
    let n_cons = model.constraints.len() as f64;
    let n_disj = model.constraints.iter().filter(|c| matches!(c, Constraint::Disjunction(..))).count() as f64;
    let sizes: Vec<f64> = model.variables.iter().map(|v| v.domain.size() as f64).collect();
    let sum_sizes: f64 = sizes.iter().sum();
    let max_size = sizes.iter().copied().fold(0.0, f64::max);
    let obj = model.objective_domain();
    let arity: f64 = model.constraints.iter().map(|c| c.arity() as f64).sum();
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };

    let values = [
        n_vars,
        n_cons,
        n_cons - n_disj,
        n_disj,
        sum_sizes,
        ratio(sum_sizes, n_vars),
        max_size,
        (obj.ub - obj.lb) as f64,
        ratio(n_cons, n_vars),
        ratio(arity, n_cons),
    ];
    RawFeatures { names: MODEL_FEATURES.iter().map(|n| format!("model.{n}")).collect(), values: values.to_vec() }
}

/// Instance and model features of a valid instance.
pub fn raw_features(instance: &Instance) -> Result<RawFeatures> {
    let model = compile(instance)?;
    let mut f = instance_features(instance);
    f.extend(model_features(&model));
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub feature_names: Vec<String>,
    pub keep_mask: Vec<bool>,
    pub variance_threshold: f64,
    pub convention: String,
}

impl FeatureSchema {
    pub fn kept(&self) -> usize {
        self.keep_mask.iter().filter(|&&k| k).count()
    }

    pub fn kept_names(&self) -> impl Iterator<Item = &str> {
        self.feature_names.iter().zip(&self.keep_mask).filter(|(_, &k)| k).map(|(n, _)| n.as_str())
    }

    pub fn id(&self) -> u64 {
        let mut h = Fnv64::default();
        for (n, &k) in self.feature_names.iter().zip(&self.keep_mask) {
            h.write_str(n);
            h.write(&[u8::from(k)]);
        }
        h.finish()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub schema_id: u64,
}

fn population_variance(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

/// Keeps feature `i` iff its population variance over `raw` exceeds
/// `variance_threshold`.
pub fn fit_schema(raw: &[RawFeatures], variance_threshold: f64) -> Result<FeatureSchema> {
    if raw.len() < 2 {
        return Err(Error::Schema(format!("need at least 2 vectors, got {}", raw.len())));
    }
    let names = &raw[0].names;
    if let Some(bad) = raw.iter().position(|r| &r.names != names || r.values.len() != names.len()) {
        return Err(Error::Schema(format!("vector {bad} has a different feature list")));
    }
    let keep_mask: Vec<bool> =
        (0..names.len()).map(|i| population_variance(raw.iter().map(|r| r.values[i])) > variance_threshold).collect();
    if !keep_mask.iter().any(|&k| k) {
        return Err(Error::Schema("every feature is below the variance threshold".to_string()));
    }
    Ok(FeatureSchema {
        feature_names: names.clone(),
        keep_mask,
        variance_threshold,
        convention: STAT_CONVENTION.to_string(),
    })
}

pub fn apply_schema(schema: &FeatureSchema, raw: &RawFeatures) -> Result<FeatureVector> {
    if raw.names != schema.feature_names {
        return Err(Error::Schema("feature names differ from the schema".to_string()));
    }
    let values: Vec<f64> = raw.values.iter().zip(&schema.keep_mask).filter(|(_, &k)| k).map(|(&v, _)| v).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Schema("non-finite feature value".to_string()));
    }
    Ok(FeatureVector { values, schema_id: schema.id() })
}
