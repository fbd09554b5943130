//! Sparse multilinear polynomials over the group `C_2^n = {+1,-1}^n`.

mod monomial;
mod poly;
mod scalar;

pub(crate) use monomial::word_count;

pub use monomial::{point_from_signs, Monomial};
pub use poly::{fourier_coeffs, fourier_coeffs_with_limit, FloatPoly, MultilinearPoly, RationalPoly};
pub use scalar::{ratio, rational_from_f64, Rational, Scalar};

/// Hard ceiling on the number of variables.
pub const MAX_VARS: usize = 1024;

/// Largest `n` for which dense `2^n` enumeration is allowed by default.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 20;
