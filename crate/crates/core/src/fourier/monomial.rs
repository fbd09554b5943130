use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{FsosError, Result};

use super::MAX_VARS;

/// A square-free monomial `z^alpha`, stored as the bitset of `alpha`.
///
/// Bit `i` (0-based) is variable `y_{i+1}`. Every monomial built for a
/// given `n` carries exactly `ceil(n / 64)` words (at least one), so
/// monomials of the same width compare and hash consistently.
///
/// The group product is XOR and every monomial is its own inverse.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    words: SmallVec<[u64; 2]>,
}

pub(crate) fn word_count(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

impl Monomial {
    /// The identity `z^0 = 1` for `n` variables.
    pub fn one(n: usize) -> Self {
        Monomial {
            words: SmallVec::from_elem(0, word_count(n)),
        }
    }

    /// Builds `y_{v_1} * ... * y_{v_k}` from 1-based variable indices.
    ///
    /// Repeated indices cancel (`y_i^2 = 1`).
    pub fn from_vars(n: usize, vars: &[usize]) -> Result<Self> {
        if n > MAX_VARS {
            return Err(FsosError::TooManyVariables(n));
        }
        let mut m = Monomial::one(n);
        for &v in vars {
            if v == 0 || v > n {
                return Err(FsosError::InvalidArgument(format!(
                    "variable index {v} outside 1..={n}"
                )));
            }
            m.toggle(v - 1);
        }
        Ok(m)
    }

    /// Monomial whose low 64 bits are `bits`; used for `n <= 64` enumeration.
    pub fn from_low_bits(n: usize, bits: u64) -> Self {
        let mut m = Monomial::one(n);
        let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        m.words[0] = bits & mask;
        m
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn low_bits(&self) -> u64 {
        self.words[0]
    }

    pub fn is_one(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of variables in the monomial.
    pub fn degree(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Whether 0-based variable `i` appears.
    pub fn contains(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub(crate) fn toggle(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Group product `z^alpha * z^beta = z^(alpha xor beta)`.
    pub fn xor(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.words.len(), other.words.len());
        Monomial {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    /// Parity of `|alpha AND neg|`: the sign of `y^alpha` at the point whose
    /// `-1` entries are `neg`.
    #[inline]
    pub fn odd_overlap(&self, neg: &Monomial) -> bool {
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(neg.words.iter()) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    /// 1-based indices of the variables present, ascending.
    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + tz + 1)
                }
            })
        })
    }

    /// Graded order: degree first, then the canonical order. Used for display.
    pub fn graded_cmp(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| {
                // ascending variable lists compared lexicographically
                self.vars().cmp(other.vars())
            })
    }
}

/// Canonical order: lexicographic on the exponent tuple
/// `(alpha_1, ..., alpha_n)` with `0 < 1`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(other.words.iter()) {
            if a != b {
                let diff = a ^ b;
                let lowest = diff & diff.wrapping_neg();
                return if a & lowest != 0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
        }
        self.words.len().cmp(&other.words.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for v in self.vars() {
            if !first {
                f.write_str("*")?;
            }
            write!(f, "y{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Converts a `+-1` sign vector to the bitset of its `-1` positions.
pub fn point_from_signs(n: usize, y: &[i64]) -> Result<Monomial> {
    if y.len() != n {
        return Err(FsosError::PointLength {
            expected: n,
            got: y.len(),
        });
    }
    let mut neg = Monomial::one(n);
    for (i, &v) in y.iter().enumerate() {
        match v {
            1 => {}
            -1 => neg.toggle(i),
            other => return Err(FsosError::NotASignVector { index: i, value: other }),
        }
    }
    Ok(neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_is_self_inverse() {
        let a = Monomial::from_vars(5, &[1, 3, 5]).unwrap();
        assert!(a.xor(&a).is_one());
    }

    #[test]
    fn repeated_vars_cancel() {
        let a = Monomial::from_vars(3, &[2, 2, 3]).unwrap();
        assert_eq!(a, Monomial::from_vars(3, &[3]).unwrap());
    }

    #[test]
    fn canonical_order_is_exponent_lex() {
        let n = 4;
        let m = |v: &[usize]| Monomial::from_vars(n, v).unwrap();
        // (0,0,1,1) < (0,1,0,1) < (0,1,1,0) < (1,0,0,1) < (1,1,0,0)
        let mut v = vec![m(&[1, 2]), m(&[1, 4]), m(&[2, 3]), m(&[3, 4]), m(&[2, 4])];
        v.sort();
        assert_eq!(v, vec![m(&[3, 4]), m(&[2, 4]), m(&[2, 3]), m(&[1, 4]), m(&[1, 2])]);
        assert!(Monomial::one(n) < m(&[4]));
    }

    #[test]
    fn wide_monomials() {
        let n = 130;
        let a = Monomial::from_vars(n, &[1, 65, 130]).unwrap();
        assert_eq!(a.words().len(), 3);
        assert_eq!(a.vars().collect::<Vec<_>>(), vec![1, 65, 130]);
        assert_eq!(a.degree(), 3);
        assert_eq!(a.to_string(), "y1*y65*y130");
    }

    #[test]
    fn rejects_bad_points() {
        assert!(matches!(
            point_from_signs(2, &[1, 0]),
            Err(FsosError::NotASignVector { index: 1, value: 0 })
        ));
        assert!(point_from_signs(2, &[1]).is_err());
    }
}
