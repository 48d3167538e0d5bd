//! Label scaling, label shift and the (shifted) squared error loss.

use serde::{Deserialize, Serialize};

/// Maps the original objective domain `lb..ub` onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scaler {
    pub lb: i64,
    pub ub: i64,
}

impl Scaler {
    pub fn new(lb: i64, ub: i64) -> Self {
        Scaler { lb, ub }
    }

    fn width(&self) -> f64 {
        (self.ub - self.lb) as f64
    }

    /// A single-point domain scales everything to 0.
    pub fn scale(&self, z: i64) -> f64 {
        if self.ub <= self.lb {
            return 0.0;
        }
        (z - self.lb) as f64 / self.width()
    }

    pub fn unscale(&self, y: f64) -> f64 {
        if self.ub <= self.lb {
            return self.lb as f64;
        }
        self.lb as f64 + y * self.width()
    }
}

/// Which side of the optimum a model is trained to land on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Underestimate,
    Overestimate,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Underestimate => "underestimate",
            Direction::Overestimate => "overestimate",
        }
    }
}

/// Moves a scaled label towards the domain bound on the safe side:
/// `y + lambda (1 - y)` when overestimating, `y - lambda y` when
/// underestimating.
pub fn label_shift(y: f64, lambda: f64, direction: Direction) -> f64 {
    match direction {
        Direction::Overestimate => y + lambda * (1.0 - y),
        Direction::Underestimate => y - lambda * y,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Squared,
    ShiftedSquared,
}

/// `L(r) = r^2 (sgn(r) + alpha)^2` with `r = prediction - target`.
///
/// Negative `alpha` penalizes underestimation (r < 0) more, positive `alpha`
/// penalizes overestimation more. `alpha = 0` is plain squared error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub kind: LossKind,
    pub alpha: f64,
}

impl LossSpec {
    pub const SQUARED: LossSpec = LossSpec { kind: LossKind::Squared, alpha: 0.0 };

    pub fn shifted(alpha: f64) -> Self {
        LossSpec { kind: LossKind::ShiftedSquared, alpha }
    }

    /// `alpha` as used by the formula; `Squared` is always 0.
    pub fn effective_alpha(&self) -> f64 {
        match self.kind {
            LossKind::Squared => 0.0,
            LossKind::ShiftedSquared => self.alpha,
        }
    }

    /// Same loss for the opposite direction.
    pub fn mirrored(&self) -> Self {
        LossSpec { kind: self.kind, alpha: if self.alpha == 0.0 { 0.0 } else { -self.alpha } }
    }

    fn factor(&self, r: f64) -> f64 {
        let f = sgn(r) + self.effective_alpha();
        f * f
    }

    pub fn value(&self, r: f64) -> f64 {
        r * r * self.factor(r)
    }

    /// d/d(prediction)
    pub fn gradient(&self, r: f64) -> f64 {
        2.0 * r * self.factor(r)
    }

    pub fn hessian(&self, r: f64) -> f64 {
        2.0 * self.factor(r)
    }
}

/// Sign with `sgn(0) = 0`.
pub fn sgn(r: f64) -> f64 {
    if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn loss_value(r: f64, spec: &LossSpec) -> f64 {
    spec.value(r)
}

pub fn loss_gradient(r: f64, spec: &LossSpec) -> f64 {
    spec.gradient(r)
}

pub fn loss_hessian(r: f64, spec: &LossSpec) -> f64 {
    spec.hessian(r)
}
