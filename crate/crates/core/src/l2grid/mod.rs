//! `L^2(R)` on dyadic grids.
//!
//! Functions are sampled at `j 2^-g`. Translations by dyadic rationals and
//! dilations by powers of two are exact reindexings; the Fourier transform
//! `(F xi)(t) = int e(t x) xi(x) dx` is one FFT with a phase correction.

mod fourier;
mod grid;
mod symbol;

use thiserror::Error;

pub use fourier::{
    conjugated_pi, eta, fourier, fourier_inv, fourier_inv_with, fourier_with, multiply, pi_apply,
    verify_intertwining,
};
pub use grid::{GridFunction, SampleStyle};
pub use symbol::{SymbolFunction, GAUSS_TAIL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("the symbol has no sampled inverse transform")]
    NoInverseTransform,
    #[error("tabulated pair fails the Fourier round trip (relative error {0:e})")]
    TabulatedMismatch(f64),
    #[error("bad grid CSV: {0}")]
    Csv(String),
}
