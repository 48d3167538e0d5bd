//! Learned objective boundaries for finite-domain constraint optimization.
//!
//! The crate covers the whole pipeline without touching the filesystem:
//!
//!  - [`model`], [`generate`] and [`compile`] describe problem instances and
//!    turn them into flat integer constraint systems.
//!  - [`stats`] and [`features`] map an instance onto a fixed-size numeric
//!    description.
//!  - [`loss`] and [`estimator`] train direction-specific regressors whose
//!    outputs become lower and upper objective boundaries.
//!  - [`solver`] is a small branch-and-bound engine used both to label
//!    training data and to measure the effect of injected boundaries.
//!  - [`validation`], [`metrics`] and [`bench`] evaluate estimators and
//!    solver runs.
//!
//! The crate is `no_std` with `alloc`. Enabling the `std` feature adds a
//! monotonic wall clock for solver budgets and runs independent folds,
//! sweep points and benchmark instances on the rayon thread pool.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bench;
pub mod compile;
pub mod error;
pub mod estimator;
pub mod features;
pub mod generate;
pub mod hash;
pub mod loss;
pub mod metrics;
pub mod model;
pub mod solver;
pub mod stats;
pub mod validation;

mod par;

pub use error::{Error, Result};
pub use model::{Constraint, Domain, FlatModel, Instance, Linear, ParamValue, ProblemClass, Relation, Sense, VarId};
