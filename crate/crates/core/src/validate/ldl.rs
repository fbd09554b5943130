//! Exact positive-semidefiniteness test by fraction-free symmetric elimination.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::fourier::Rational;

/// Result of eliminating a symmetric integer matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LdlOutcome {
    pub psd: bool,
    /// Smallest pivot `d_k` of `P M P^T = L D L^T` (0 for the empty matrix).
    pub min_pivot: Rational,
    pub rank: usize,
}

/// Decides `M >= 0` for a symmetric integer matrix.
///
/// Diagonal pivoting picks the largest remaining diagonal entry. Bareiss
/// updates keep every entry an integer; pivot `d_k` is `B_k / B_{k-1}`.
/// A zero largest diagonal forces the remaining block to vanish.
pub fn psd_integer(mut a: Vec<Vec<BigInt>>) -> LdlOutcome {
    let n = a.len();
    let mut prev = BigInt::one();
    let mut min_pivot: Option<Rational> = None;
    let mut rank = 0;
    let note = |p: Rational, min: &mut Option<Rational>| {
        if min.as_ref().is_none_or(|m| p < *m) {
            *min = Some(p);
        }
    };
    for k in 0..n {
        let (best, _) = (k..n)
            .map(|i| (i, &a[i][i]))
            .fold((k, &a[k][k]), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best != k {
            a.swap(best, k);
            for row in a.iter_mut() {
                row.swap(best, k);
            }
        }
        let pivot = a[k][k].clone();
        if pivot.is_negative() {
            note(Rational::new(pivot, prev.clone()), &mut min_pivot);
            return LdlOutcome {
                psd: false,
                min_pivot: min_pivot.expect("just set"),
                rank,
            };
        }
        if pivot.is_zero() {
            note(Rational::zero(), &mut min_pivot);
            let rest_zero = (k..n).all(|i| (k..n).all(|j| a[i][j].is_zero()));
            return LdlOutcome {
                psd: rest_zero,
                min_pivot: min_pivot.expect("just set"),
                rank,
            };
        }
        note(Rational::new(pivot.clone(), prev.clone()), &mut min_pivot);
        rank += 1;
        for i in k + 1..n {
            for j in i..n {
                let v = (&pivot * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v.clone();
                a[j][i] = v;
            }
        }
        prev = pivot;
    }
    LdlOutcome {
        psd: true,
        min_pivot: min_pivot.unwrap_or_else(Rational::zero),
        rank,
    }
}

/// Rational wrapper: clears denominators and calls [`psd_integer`].
pub fn psd_rational(a: &[Vec<Rational>]) -> LdlOutcome {
    use num_integer::Integer;
    let den = a
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints = a
        .iter()
        .map(|row| row.iter().map(|v| v.numer() * (&den / v.denom())).collect())
        .collect();
    let mut out = psd_integer(ints);
    out.min_pivot /= Rational::from_integer(den);
    out
}
