//! Exact and numerical tools for the 2-adic ring C*-algebra.
//!
//! [`qalgebra`] is the symbolic core: words in `u`, `s`, `s*` become partial
//! affine maps of `Z`, which gives canonical forms and decidable equality.
//! [`numbers`] holds the dyadic and 2-adic arithmetic underneath everything.
//! [`wold`] builds the unitary extending a pair of Cuntz isometries,
//! [`l2grid`] models `L^2(R)` on dyadic grids, and [`bimodule`] puts the two
//! sides together in the bimodule connecting the regular representation on
//! `l^2(Z)` with the standard representation on `L^2(R)`.

pub mod numbers;
pub mod qalgebra;
pub mod wold;
pub mod l2grid;
pub mod bimodule;
