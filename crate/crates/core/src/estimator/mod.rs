//! Direction-specific boundary regressors.
//!
//! Each [`TrainedEstimator`] predicts the scaled position of the optimum in
//! the instance's original objective domain, biased towards one side by
//! label shift and (for boosting and networks) an asymmetric loss. A lower
//! and an upper estimator together yield a [`BoundaryEstimate`].

pub mod gtb;
pub mod linear;
pub mod nn;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{apply_schema, raw_features, FeatureSchema, FeatureVector, RawFeatures};
use crate::loss::{label_shift, Direction, LossKind, LossSpec, Scaler};
use crate::model::{Instance, ProblemClass, Sense};

pub use gtb::GtbParams;
pub use nn::NnParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lr,
    Gtb,
    Nn,
}

/// Hyperparameters, by model kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Lr,
    Gtb(GtbParams),
    Nn(NnParams),
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Lr => ModelKind::Lr,
            ModelSpec::Gtb(_) => ModelKind::Gtb,
            ModelSpec::Nn(_) => ModelKind::Nn,
        }
    }
}

/// The five estimator variants, with their default loss factor and label
/// shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Lr,
    GtbS,
    GtbA,
    NnS,
    NnA,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Lr, Variant::GtbS, Variant::GtbA, Variant::NnS, Variant::NnA];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Lr => "lr",
            Variant::GtbS => "gtb-s",
            Variant::GtbA => "gtb-a",
            Variant::NnS => "nn-s",
            Variant::NnA => "nn-a",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn default_lambda(self) -> f64 {
        match self {
            Variant::NnA => 0.1,
            Variant::GtbA => 0.3,
            Variant::Lr | Variant::NnS => 0.5,
            Variant::GtbS => 0.4,
        }
    }

    /// Loss factor of the overestimator; the underestimator uses `-alpha`.
    pub fn default_alpha(self) -> f64 {
        match self {
            Variant::GtbA => -1.0,
            Variant::NnA => -0.8,
            _ => 0.0,
        }
    }

    pub fn is_asymmetric(self) -> bool {
        matches!(self, Variant::GtbA | Variant::NnA)
    }

    pub fn spec(self) -> ModelSpec {
        match self {
            Variant::Lr => ModelSpec::Lr,
            Variant::GtbS | Variant::GtbA => ModelSpec::Gtb(GtbParams::default()),
            Variant::NnS | Variant::NnA => ModelSpec::Nn(NnParams::default()),
        }
    }

    /// Lower/upper configuration pair. `alpha` is the overestimator's loss
    /// factor and must be `<= 0`.
    pub fn pair(self, lambda: f64, alpha: f64, seed: u64) -> PairConfig {
        let over = if self.is_asymmetric() { LossSpec::shifted(alpha) } else { LossSpec::SQUARED };
        let make =
            |direction, loss: LossSpec, seed| EstimatorConfig { model: self.spec(), loss, lambda, direction, seed };
        PairConfig {
            lower: make(Direction::Underestimate, over.mirrored(), seed),
            upper: make(Direction::Overestimate, over, seed.wrapping_add(1)),
        }
    }

    pub fn default_pair(self, seed: u64) -> PairConfig {
        self.pair(self.default_lambda(), self.default_alpha(), seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub model: ModelSpec,
    pub loss: LossSpec,
    pub lambda: f64,
    pub direction: Direction,
    pub seed: u64,
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(Error::validation("lambda", format!("{} not in [0, 1)", self.lambda)));
        }
        let alpha = self.loss.alpha;
        if !(-1.0..=1.0).contains(&alpha) {
            return Err(Error::validation("alpha", format!("{alpha} not in [-1, 1]")));
        }
        if self.loss.kind == LossKind::Squared && alpha != 0.0 {
            return Err(Error::validation("alpha", "squared loss has alpha = 0"));
        }
        match self.direction {
            Direction::Overestimate if alpha > 0.0 => {
                Err(Error::validation("alpha", "an overestimator needs alpha <= 0"))
            }
            Direction::Underestimate if alpha < 0.0 => {
                Err(Error::validation("alpha", "an underestimator needs alpha >= 0"))
            }
            _ => Ok(()),
        }
    }

    /// Canonical form: a shifted loss with `alpha = 0` is plain squared error.
    pub fn canonical(mut self) -> Self {
        if self.loss.effective_alpha() == 0.0 {
            self.loss = LossSpec::SQUARED;
        }
        self
    }

    /// Scaled, shifted training label of a solved instance.
    pub fn label(&self, instance: &Instance) -> Option<f64> {
        instance.scaled_optimum().map(|y| label_shift(y, self.lambda, self.direction))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairConfig {
    pub lower: EstimatorConfig,
    pub upper: EstimatorConfig,
}

impl PairConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lower.direction != Direction::Underestimate || self.upper.direction != Direction::Overestimate {
            return Err(Error::validation("direction", "pair must be (underestimate, overestimate)"));
        }
        self.lower.validate()?;
        self.upper.validate()
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lower.lambda = lambda;
        self.upper.lambda = lambda;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Parameters {
    Lr(linear::LinearModel),
    Gtb(gtb::Ensemble),
    Nn(nn::Network),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedEstimator {
    pub class: ProblemClass,
    pub config: EstimatorConfig,
    pub schema: FeatureSchema,
    pub parameters: Parameters,
}

/// Fits one estimator on `(features, shifted scaled label)` pairs.
pub fn train(
    class: ProblemClass,
    config: &EstimatorConfig,
    schema: &FeatureSchema,
    examples: &[(FeatureVector, f64)],
) -> Result<TrainedEstimator> {
    config.validate()?;
    let config = config.canonical();
    if examples.is_empty() {
        return Err(Error::Training("empty dataset".to_string()));
    }
    if let Some(i) = examples.iter().position(|(_, y)| !y.is_finite()) {
        return Err(Error::validation("label", format!("example {i} has a non-finite label")));
    }
    let sid = schema.id();
    if examples.iter().any(|(v, _)| v.schema_id != sid || v.values.len() != schema.kept()) {
        return Err(Error::Schema("training vector from a different schema".to_string()));
    }
    let xs: Vec<&[f64]> = examples.iter().map(|(v, _)| v.values.as_slice()).collect();
    let ys: Vec<f64> = examples.iter().map(|(_, y)| *y).collect();
    let parameters = match config.model {
        ModelSpec::Lr => Parameters::Lr(linear::fit(&xs, &ys)),
        ModelSpec::Gtb(p) => Parameters::Gtb(gtb::fit(&xs, &ys, &config.loss, p)),
        ModelSpec::Nn(p) => Parameters::Nn(nn::fit(&xs, &ys, &config.loss, &p, config.seed)),
    };
    Ok(TrainedEstimator { class, config, schema: schema.clone(), parameters })
}

impl TrainedEstimator {
    pub fn direction(&self) -> Direction {
        self.config.direction
    }

    /// Unclipped model output.
    pub fn predict_raw(&self, v: &FeatureVector) -> Result<f64> {
        if v.schema_id != self.schema.id() || v.values.len() != self.schema.kept() {
            return Err(Error::Schema("vector does not match the estimator's schema".to_string()));
        }
        let x = &v.values;
        Ok(match &self.parameters {
            Parameters::Lr(m) => m.predict(x),
            Parameters::Gtb(e) => e.predict(x),
            Parameters::Nn(n) => n.predict(x),
        })
    }

    /// Scaled boundary in `[0, 1]`.
    pub fn predict(&self, v: &FeatureVector) -> Result<f64> {
        self.predict_raw(v).map(clip_unit)
    }

    pub fn features(&self, instance: &Instance) -> Result<FeatureVector> {
        apply_schema(&self.schema, &raw_features(instance)?)
    }
}

/// Clips into `[0, 1]`; NaN maps to 0.5 so the result stays total.
pub fn clip_unit(y: f64) -> f64 {
    if y.is_nan() {
        0.5
    } else {
        y.clamp(0.0, 1.0)
    }
}

/// Estimated objective domain `est_lb..est_ub`, always inside the original
/// domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryEstimate {
    pub est_lb: i64,
    pub est_ub: i64,
    pub clamped_lb: bool,
    pub clamped_ub: bool,
    pub crossed: bool,
}

/// Values within this distance of an integer are treated as that integer
/// before flooring/ceiling.
const SNAP: f64 = 1e-9;

fn snap(v: f64) -> f64 {
    let r = libm::round(v);
    if (v - r).abs() < SNAP {
        r
    } else {
        v
    }
}

impl BoundaryEstimate {
    pub fn original(lb: i64, ub: i64) -> Self {
        BoundaryEstimate { est_lb: lb, est_ub: ub, clamped_lb: false, clamped_ub: false, crossed: false }
    }

    /// Turns scaled predictions into integer bounds: the lower one is
    /// floored, the upper one ceiled, both clamped into `lb..ub`. If they
    /// cross, the limiting side reverts to its original value.
    pub fn from_scaled(lb: i64, ub: i64, sense: Sense, lower: f64, upper: f64) -> Self {
        let scaler = Scaler::new(lb, ub);
        let lo_f = libm::floor(snap(scaler.unscale(clip_unit(lower))));
        let hi_f = libm::ceil(snap(scaler.unscale(clip_unit(upper))));
        let clamp = |v: f64| -> (i64, bool) {
            if v < lb as f64 {
                (lb, true)
            } else if v > ub as f64 {
                (ub, true)
            } else {
                (v as i64, false)
            }
        };
        let (mut est_lb, clamped_lb) = clamp(lo_f);
        let (mut est_ub, clamped_ub) = clamp(hi_f);
        let crossed = est_lb > est_ub;
        if crossed {
            match sense {
                Sense::Minimize => est_lb = lb,
                Sense::Maximize => est_ub = ub,
            }
        }
        BoundaryEstimate { est_lb, est_ub, clamped_lb, clamped_ub, crossed }
    }

    pub fn contains(&self, z: i64) -> bool {
        self.est_lb <= z && z <= self.est_ub
    }
}

/// Predicts both boundaries for `instance`.
pub fn estimate_bounds(
    lower: &TrainedEstimator,
    upper: &TrainedEstimator,
    instance: &Instance,
) -> Result<BoundaryEstimate> {
    check_pair(lower, upper, instance)?;
    estimate_bounds_raw(lower, upper, instance, &raw_features(instance)?)
}

/// [`estimate_bounds`] with precomputed raw features of `instance`.
pub fn estimate_bounds_raw(
    lower: &TrainedEstimator,
    upper: &TrainedEstimator,
    instance: &Instance,
    raw: &RawFeatures,
) -> Result<BoundaryEstimate> {
    check_pair(lower, upper, instance)?;
    let pl = lower.predict(&apply_schema(&lower.schema, raw)?)?;
    let pu = upper.predict(&apply_schema(&upper.schema, raw)?)?;
    Ok(BoundaryEstimate::from_scaled(instance.objective_lb, instance.objective_ub, instance.sense(), pl, pu))
}

fn check_pair(lower: &TrainedEstimator, upper: &TrainedEstimator, instance: &Instance) -> Result<()> {
    if lower.direction() != Direction::Underestimate || upper.direction() != Direction::Overestimate {
        return Err(Error::Mismatch("need an underestimator and an overestimator".to_string()));
    }
    if lower.class != instance.class || upper.class != instance.class {
        return Err(Error::Mismatch(format!("estimators are not trained for class {}", instance.class)));
    }
    Ok(())
}

/// Name of a stored estimator, e.g. `"gtb-a"`, derived from its config.
pub fn variant_name(config: &EstimatorConfig) -> String {
    let kind = match config.model.kind() {
        ModelKind::Lr => return "lr".to_string(),
        ModelKind::Gtb => "gtb",
        ModelKind::Nn => "nn",
    };
    let suffix = if config.loss.effective_alpha() == 0.0 { "s" } else { "a" };
    format!("{kind}-{suffix}")
}
