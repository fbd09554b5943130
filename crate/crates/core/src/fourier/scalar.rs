use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact arbitrary-precision rational used on every validation path.
pub type Rational = BigRational;

/// Coefficient field of a [`MultilinearPoly`](super::MultilinearPoly).
///
/// Implemented for `f64` (solver path) and [`Rational`] (validation path).
pub trait Scalar: Clone + Debug + PartialOrd + Signed + Send + Sync + 'static {
    fn from_i64(v: i64) -> Self;

    /// Converts an exact rational, rounding when `Self` is a float.
    fn from_rational(r: &Rational) -> Self;

    /// Nearest `f64`; lossy for rationals.
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact conversion of a finite float to a rational.
///
/// # Panics
/// On NaN or infinity.
pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_f64(x).expect("finite float")
}

/// `num / den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
