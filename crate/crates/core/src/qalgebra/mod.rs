//! The dense *-subalgebra generated by `u` and `s`.
//!
//! A word `u^a s^i s*^j u^b` acts on `l^2(Z)` as a partial affine bijection
//! of `Z`, and the representation on `l^2(Z)` is faithful. Elements are
//! therefore stored as combinations of such maps ([`QMonomial`]), products
//! are composition of maps, and equality is equality of canonical forms.
//! The relations `s u = u^2 s` and `s s* + u s s* u* = 1` come out as
//! theorems instead of rewrite rules.

mod element;
mod embed;
mod monomial;

pub use element::{
    exact, exact_ratio, exact_to_numeric, CoeffValue, ElementRecord, ExactCoeff, ExactVector, QElement,
    SparseVector, TermRecord, NUMERIC_ZERO,
};
pub use embed::{
    mat2_add, mat2_adjoint, mat2_equals, mat2_identity, mat2_mul, matrix_embed_theta12, matrix_unit,
    truncate_matrix, Mat2, TruncatedMatrix,
};
pub use monomial::{QMonomial, Word, MAX_LEVEL};
