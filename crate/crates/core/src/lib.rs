//! Spectral-kernel toolkit for sum-stable (SαS) and max-stable (α-Fréchet)
//! processes on discretized measure spaces.
//!
//! The crate represents a process through its spectral functions — a matrix
//! of kernel values over a time grid × finite measure space — and exploits
//! the fact that on finite spaces the stable and extremal integrals are
//! plain weighted sums and maxima of independent atoms. That makes the
//! finite-dimensional-distribution functionals exactly computable, the
//! simulators exact in law, and the structural questions (max-associability,
//! norm-system equivalence, stationarity and self-similarity transfer,
//! conservative/dissipative and positive/null classification) decidable or
//! testable directly on the kernel data.
//!
//! Modules:
//! * [`measure`] — measure spaces, time grids, kernels, α-norms and ρ-metric
//! * [`marginals`] — scalar SαS / α-Fréchet laws, samplers, CF and CDF
//! * [`integrals`] — joint simulation, fdd exponents, representation tests
//! * [`association`] — associability, association, equivalence and transfer
//! * [`kernels`] — parametric kernel builders and the structure checker
//! * [`decomposition`] — C/D and P/N classification, components, factorization
//! * [`kernel_spec`] — the kernel-spec file format

// `!(x > 0.0)` guards reject NaN, which the suggested `x <= 0.0` would accept
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod association;
pub mod decomposition;
pub mod error;
pub mod integrals;
pub mod kernel_spec;
pub mod kernels;
pub mod marginals;
pub mod measure;

pub use error::{Result, StableError};
pub use measure::{
    GridKind, KahanSum, MeasureSpace, Regime, SignClass, SpectralKernel, StabilityIndex, TimeGrid,
};
