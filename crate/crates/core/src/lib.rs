//! Finite-dimensional toolkit for Schatten-class operators, Schur products,
//! Riesz-represented bilinear forms and biregularity diagnostics.
//!
//! Operators on a separable Hilbert space are modelled by their truncations to
//! the first `N` coordinates. The [`engine`] builds iterated double-limit
//! grids `m(a_i a~_j, b_i b~_j)` for a bilinear form `m` and four bounded
//! sequence families, estimates both iterated limits, and reports whether they
//! agree. [`tensor`] brackets projective tensor norms from above and below.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod engine;
pub mod error;
pub mod forms;
pub mod matrix;
pub mod operators;
pub mod par;
pub mod random;
pub mod report;
pub mod svd;
pub mod tensor;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, ComplexVector, C64};
pub use operators::{
    coordinate_projection, rank_one, schatten_norm, schur, schur_tail_bound, tail_sup,
    SchattenExponent,
};
pub use svd::{pinv, singular_values, svd, SingularSpectrum, Svd};
