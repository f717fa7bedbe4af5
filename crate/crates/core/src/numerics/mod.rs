//! Shared numerical substrate.

pub mod kde;
pub mod linalg;
pub mod quadrature;
pub mod quantile;
pub mod rng;
pub mod stats;

pub use kde::{kde_with_derivative, silverman_bandwidth};
pub use linalg::{solve_spd, Matrix, Vector};
pub use quadrature::{integrate, integrate_real_line, Integral};
pub use quantile::{empirical_quantile, QuantileFn};
pub use rng::RngStream;
