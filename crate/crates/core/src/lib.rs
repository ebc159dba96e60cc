//! Exact-arithmetic laboratory for lossy reductions of finite promise problems.
//!
//! Modules build on each other bottom-up:
//!
//! - [`problems`]: promise problems over fixed-length bit strings.
//! - [`information`]: exact distributions, distances, entropies.
//! - [`reductions`]: stochastic reductions and their error/lossiness measures.
//! - [`disguise`]: exact zero-sum games, sparsification, disguising collections.
//! - [`szk`]: the circuit pair built from a collection, gap reports, polarization.
//! - [`crypto`]: EFI pairs, one-way function candidates and their decision procedures.
//! - [`params`]: closed-form threshold and regime arithmetic.
//!
//! All distances and game values are exact rationals; logarithmic quantities are `f64`.

pub mod crypto;
pub mod disguise;
pub mod error;
pub mod information;
pub mod lp;
pub mod params;
pub mod problems;
pub mod rational;
pub mod reductions;
pub mod rng;
pub mod szk;

pub use error::{Error, Result};
pub use rational::Rational;
