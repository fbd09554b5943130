//! Bounds on a low-degree polynomial away from the low-weight points where
//! it is known to be small.

use num_bigint::BigInt;

use crate::error::{FsosError, Result};
use crate::fourier::Rational;

pub(crate) fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut r = BigInt::from(1);
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

fn int(v: BigInt) -> Rational {
    Rational::from_integer(v)
}

/// `eps * sum_{j<=d} 2^j C(w, j)`, valid at any point of weight `w >= d + 1`.
pub fn extrapolation_bound_general(d: usize, w: usize, eps: &Rational) -> Rational {
    let s: BigInt = (0..=d).map(|j| (BigInt::from(1) << j) * binom(w, j)).sum();
    eps * int(s)
}

/// `eps * C(w, d) * sum_{p<=d} ((w - d)/(w - p)) C(d, p)` for a cube point of
/// weight `w >= d + 1`; attained by the alternating interpolant.
pub fn extrapolation_bound(d: usize, w: usize, eps: &Rational) -> Result<Rational> {
    if w < d + 1 {
        return Err(FsosError::InvalidArgument(format!(
            "weight {w} must exceed the degree {d}"
        )));
    }
    let mut s = Rational::from_integer(BigInt::from(0));
    for p in 0..=d {
        s += Rational::new(BigInt::from(w - d), BigInt::from(w - p)) * int(binom(d, p));
    }
    Ok(eps * int(binom(w, d)) * s)
}

/// Closed relaxation `eps * C(w, d) * (2^d - (d / w) 2^(d-1))`.
pub fn extrapolation_bound_relaxed(d: usize, w: usize, eps: &Rational) -> Result<Rational> {
    if w < d + 1 {
        return Err(FsosError::InvalidArgument(format!(
            "weight {w} must exceed the degree {d}"
        )));
    }
    let two_d = int(BigInt::from(1) << d);
    let corr = if d == 0 {
        Rational::from_integer(BigInt::from(0))
    } else {
        Rational::new(BigInt::from(d), BigInt::from(w)) * int(BigInt::from(1) << (d - 1))
    };
    Ok(eps * int(binom(w, d)) * (two_d - corr))
}

/// `N = sum_{j<=d} C(n, j)`, the number of points of weight at most `d`.
pub fn low_weight_count(n: usize, d: usize) -> BigInt {
    (0..=d.min(n)).map(|j| binom(n, j)).sum()
}
