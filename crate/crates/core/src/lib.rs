//! Simulation and measurement toolkit for one-dimensional scalar conservation
//! laws driven by multiplicative compensated-Poisson noise,
//!
//! ```text
//! du + F(u)_x dt = ∫ η(x, u; z) Ñ(dz, dt) + ε u_xx dt,
//! ```
//!
//! together with the entropy machinery and the discrete estimators needed to
//! check BV, viscosity-rate, continuous-dependence and fractional-BV claims
//! by Monte Carlo.
//!
//! The crate is organised bottom-up:
//!
//! * [`levy_noise`]: Lévy measures, jump coefficients, coupled jump paths.
//! * [`solvers`]: periodic finite-volume solver with implicit viscosity.
//! * [`entropy`]: the smoothed-absolute-value entropy family and fluxes.
//! * [`estimators`]: norms, seminorms, moduli and rate fitting.
//! * [`experiments`]: config parsing, ensemble runners and CSV reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod levy_noise;
mod quadrature;
pub mod solvers;

pub use error::{Error, Result};
