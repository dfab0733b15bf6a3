//! Numerical laboratory for the fine-scale statistics of `{β·n^α}`.
//!
//! * [`seqgen`] — certified fractional parts in multi-precision.
//! * [`localstats`] — k-level correlation sums, gap distributions, gap sandwich bounds.
//! * [`fourier`] — exponential sums and the Poisson-summation side of `R_2`.
//! * [`oscint`] — exponential-polynomial phases, repulsion bounds, oscillatory integrals.
//! * [`montecarlo`] — expectation and variance experiments over `α ∈ [A, A+1]`.

pub mod error;
pub mod fourier;
pub mod localstats;
pub mod montecarlo;
pub mod oscint;
pub mod seqgen;

pub use error::{Error, Result};
