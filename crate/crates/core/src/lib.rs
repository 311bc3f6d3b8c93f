//! Distribution of the first hitting time of a disc by planar Brownian motion.
//!
//! The crate evaluates the hitting-time density `p_{r,x}(t)`, its CDF and its
//! Laplace transform three independent ways:
//!
//! - [`hitting_density`]: exact inversion of the Laplace transform
//!   `K0(|x|√(2λ))/K0(r√(2λ))` by collapsing the Bromwich contour onto the
//!   branch cut of `K0(√(2z))`;
//! - [`asymptotics`]: closed-form large-time approximations built on the
//!   function `W(λ) = ∫_0^∞ e^{-λu} du / ((ln u)² + π²)` ([`w_ramanujan`]);
//! - [`brownian_mc`]: Monte Carlo simulation of the radial (Bessel-2) process.
//!
//! All quantities are dimensionless; Brownian motion has generator `½Δ`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// tabulated constants keep their published digits
#![allow(clippy::excessive_precision)]

pub mod asymptotics;
pub mod brownian_mc;
pub mod consts;
pub mod error;
pub mod harness;
pub mod hitting_density;
pub mod quad;
pub mod special_fns;
pub mod w_ramanujan;

pub use error::{Error, Result};
pub use special_fns::{Evaluation, Method};

/// Crate version, embedded in every file written by the harness.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
