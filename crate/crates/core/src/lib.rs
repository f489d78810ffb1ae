//! Finite Wiener-chaos calculus on a step-function discretization of `[0, 1]`.
//!
//! The unit interval is cut into `m` equal cells `A_i = [i/m, (i+1)/m)`. A
//! kernel of order `n` is a dense order-`n` array of cell values, and the
//! multiple Wiener-Itô integral of such a step kernel is evaluated exactly
//! from the cell increments `W(A_i)` through monic Hermite polynomials. In
//! this model the isometry, the product formula and the Gamma-operator
//! identities hold exactly, so they can be checked to floating-point
//! precision rather than up to a discretization error.
//!
//! The crate is `no_std` and only needs `alloc`. Monte Carlo estimators come
//! in two forms: a serial convenience form driven by a [`NoiseSource`], and a
//! slice form that consumes pre-evaluated samples so that callers can produce
//! the samples in parallel and still reduce them in a fixed order.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod chaos;
pub mod error;
pub mod grid;
pub mod hermite;
pub mod independence;
pub mod kernel;
pub mod sequences;
pub mod stats;
pub mod stein;

mod combinatorics;
mod multiset;

pub use chaos::{ChaosExpansion, CompiledExpansion};
pub use error::{Error, Result};
pub use grid::{GaussianSample, Grid, NoiseSource};
pub use kernel::StepKernel;
