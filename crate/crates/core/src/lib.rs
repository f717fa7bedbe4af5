//! Finite-sample spread bounds, information bounds under nuisance parameters,
//! efficient one-step estimators and the Monte Carlo checks that tie them together.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: RNG streams, quadrature, quantile functions, SPD solves, kernel density.
//! * [`spread`]: spread lower bounds built from a score statistic and the spread order.
//! * [`models`]: regular parametric models with exact scores and Fisher information.
//! * [`geometry`]: partitioned information, efficient scores and influence functions.
//! * [`estimators`]: preliminary estimators, discretization, one-step and sample-splitting estimators.
//! * [`timeseries`]: AR(1) simulation, time-series LAN and the adaptive estimator.
//! * [`diagnostics`]: seeded Monte Carlo checks producing [`diagnostics::McReport`]s.
//! * [`cli`]: experiment configs and the `semieff` command-line front end.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod models;
pub mod numerics;
pub mod spread;
pub mod timeseries;

pub use error::{Error, Result};
pub use numerics::linalg::{Matrix, Vector};
pub use numerics::rng::RngStream;

/// Toolkit version stamped into every output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
