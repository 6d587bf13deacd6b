//! The pre-imprimitivity bimodule between the crossed product on the real
//! side and the 2-adic ring algebra.
//!
//! Elements are finite sums of `1_{l + k Z_2} (x) xi (x) 1_m`. The algebra
//! acts on the right by substitution, the real side acts on the left by an
//! integral against `fc`, and the algebra-valued inner product is a finite
//! sum of monomials with numeric coefficients.

mod induced;
mod inner;
mod left;
mod tensor;

use thiserror::Error;

use crate::l2grid::GridError;
use crate::numbers::NumberError;

pub use induced::{
    induce_w, induced_act, induced_act_with_precision, induced_inner, induced_norm, verify_theorem,
    verify_theorem_with_precision, InducedVector,
};
pub use inner::{q_inner, CASE_TOLERANCE};
pub use left::{left_act_r, left_act_r_with_precision, phi_eval, MAX_SPLIT_LEVELS};
pub use tensor::{ElementaryTensor, Indicator, X0Element};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BimoduleError {
    #[error("the two inner product formulas disagree by {0:e} where they overlap")]
    UnresolvedConvention(f64),
    #[error("the 2-adic phase would split an indicator into 2^{0} classes")]
    SplitTooFine(u32),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Number(#[from] NumberError),
}
