//! Green's function of the bounded-solutions problem `x'(t) − A x(t) = f(t)`
//! and computable upper bounds on its norm.
//!
//! The exact kernel is evaluated through spectral projectors and the matrix
//! exponential ([`green`]). The bounds ([`bounds`]) work from a triangular
//! (Schur) form `B = D + N`: the convolution bound built from powers of the
//! two-sided exponential envelope, its entrywise refinement, Van Loan's
//! bound on `e^{Bt}`, and an older comparison bound in terms of `‖A‖`.
//! Brute-force cross-checks live in [`oracles`].

// Negated float comparisons are deliberate: NaN must fail the guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod expm;
pub mod green;
pub mod matrix;
pub mod oracles;
pub mod quadrature;
pub mod schur;

pub use error::{GreenError, Result};
pub use expm::{matrix_exp, matrix_exp_t};
pub use green::{
    bounded_solution, green_function, spectral_gaps, spectral_projectors, GreenKernel,
    SpectralGaps, SpectralSplit,
};
pub use matrix::{
    abs_power, entrywise_abs, induced_norm, split_triangular, ComplexMatrix, NormKind,
};
pub use schur::{hessenberg, schur_decompose, SchurForm};
