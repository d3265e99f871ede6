//! # catlab
//!
//! Numerics for catalysis in majorization-based resource theories, with quantum
//! thermodynamics of block-diagonal states as the main application.
//!
//! A block-diagonal state is represented by its vector of energy populations
//! ([`ProbVec`]). On top of that the crate provides:
//!
//! - [`simplex`]: probability-vector primitives (tensor products, direct sums,
//!   trace distance, counter-based seeding).
//! - [`entropy`]: Shannon/Rényi entropies, relative entropies and their variances,
//!   Rényi divergences, generalized free energies and the embedding map.
//! - [`majorization`]: majorization, thermo-majorization curves, the ε-flattest
//!   state and the approximate catalytic step.
//! - [`catalysis`]: second laws on an α-grid, Duan catalysts, k-copy search and
//!   the closed-form error and rate bounds.
//! - [`exact`]: integer-weight majorization for zero-tolerance k-copy checks.
//! - [`convex_split`]: exact simulation of the swap-mixing channel and the
//!   convex-split bound.
//! - [`dilation`]: rational permutation dilations of Gibbs-stochastic channels.
//! - [`experiments`]: the Monte Carlo studies with deterministic per-trial seeding.
//!
//! All entropic quantities are in bits.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalysis;
pub mod convex_split;
pub mod dilation;
pub mod entropy;
mod error;
pub mod exact;
pub mod experiments;
pub mod majorization;
pub mod simplex;

pub use entropy::{AlphaGrid, ThermalContext};
pub use error::{Error, Result};
pub use simplex::{ProbVec, Seed};

/// Library version embedded in experiment outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
