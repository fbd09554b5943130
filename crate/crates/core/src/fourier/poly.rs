use std::collections::btree_map;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{FsosError, Result};

use super::monomial::{point_from_signs, Monomial};
use super::scalar::{Rational, Scalar};
use super::{DEFAULT_EXHAUSTIVE_LIMIT, MAX_VARS};

/// Sparse multilinear polynomial `sum_alpha c_alpha z^alpha` on `C_2^n`.
///
/// Terms are kept in canonical monomial order and zero coefficients are
/// never stored.
#[derive(Clone, PartialEq)]
pub struct MultilinearPoly<S> {
    n: usize,
    terms: BTreeMap<Monomial, S>,
}

pub type RationalPoly = MultilinearPoly<Rational>;
pub type FloatPoly = MultilinearPoly<f64>;

fn check_width(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(FsosError::WidthMismatch { left: a, right: b })
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_VARS {
        Err(FsosError::TooManyVariables(n))
    } else {
        Ok(())
    }
}

impl<S: Scalar> MultilinearPoly<S> {
    /// The zero polynomial in `n` variables.
    pub fn zero(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(MultilinearPoly {
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(n: usize, c: S) -> Result<Self> {
        let mut p = Self::zero(n)?;
        p.add_term(Monomial::one(n), c);
        Ok(p)
    }

    /// Sums the given terms; repeated monomials accumulate.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, S)>,
    {
        let mut p = Self::zero(n)?;
        for (m, c) in terms {
            if m.words().len() != super::word_count(n) {
                return Err(FsosError::WidthMismatch {
                    left: n,
                    right: m.words().len() * 64,
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Convenience constructor from `(1-based variable list, coefficient)` pairs.
    pub fn from_var_terms<I, V>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (V, S)>,
        V: AsRef<[usize]>,
    {
        let mut p = Self::zero(n)?;
        for (vars, c) in terms {
            p.add_term(Monomial::from_vars(n, vars.as_ref())?, c);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nonzero terms, `|supp(p)|`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> btree_map::Iter<'_, Monomial, S> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn coeff(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn constant_term(&self) -> S {
        self.coeff(&Monomial::one(self.n))
    }

    /// Adds `c * z^m`, removing the key if the result is zero.
    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    /// Largest monomial degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_width(self.n, other.n)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_width(self.n, other.n)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = MultilinearPoly {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn add_constant(&self, c: S) -> Self {
        let mut out = self.clone();
        out.add_term(Monomial::one(self.n), c);
        out
    }

    /// Group-algebra product: `r_gamma = sum_{alpha xor beta = gamma} p_alpha q_beta`.
    pub fn xor_mul(&self, other: &Self) -> Result<Self> {
        check_width(self.n, other.n)?;
        let mut acc: HashMap<Monomial, S> =
            HashMap::with_capacity(self.len().saturating_mul(other.len()).min(1 << 16));
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let prod = ca.clone() * cb.clone();
                match acc.entry(a.xor(b)) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        let v = e.get_mut();
                        *v = v.clone() + prod;
                    }
                }
            }
        }
        Ok(MultilinearPoly {
            n: self.n,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn square(&self) -> Self {
        self.xor_mul(self).expect("same width")
    }

    /// Evaluates at a sign vector `y in {+1,-1}^n`.
    pub fn eval(&self, y: &[i64]) -> Result<S> {
        let neg = point_from_signs(self.n, y)?;
        Ok(self.eval_at(&neg))
    }

    /// Evaluates at the point whose `-1` coordinates are the bits of `neg`.
    pub fn eval_at(&self, neg: &Monomial) -> S {
        let mut s = S::zero();
        for (m, c) in self.terms() {
            if m.odd_overlap(neg) {
                s = s - c.clone();
            } else {
                s = s + c.clone();
            }
        }
        s
    }

    /// `sum |p_alpha|`.
    pub fn l1_coeff_norm(&self) -> S {
        self.terms
            .values()
            .fold(S::zero(), |acc, c| acc + c.abs())
    }

    /// Values at all `2^n` points; index bit `i` set means `y_{i+1} = -1`.
    pub fn values_table(&self, limit: usize) -> Result<Vec<S>> {
        if self.n > limit || self.n >= 63 {
            return Err(FsosError::AboveExhaustiveLimit {
                n: self.n,
                limit,
            });
        }
        let size = 1usize << self.n;
        let mut v = vec![S::zero(); size];
        for (m, c) in self.terms() {
            v[m.low_bits() as usize] = c.clone();
        }
        walsh_hadamard(&mut v);
        Ok(v)
    }

    /// `max_y |p(y)|`, by enumerating all `2^n` points.
    pub fn linf_value_norm(&self) -> Result<S> {
        self.linf_value_norm_with_limit(DEFAULT_EXHAUSTIVE_LIMIT)
    }

    pub fn linf_value_norm_with_limit(&self, limit: usize) -> Result<S> {
        let table = self.values_table(limit)?;
        Ok(table
            .into_iter()
            .map(|v| v.abs())
            .fold(S::zero(), |a, b| if b > a { b } else { a }))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MultilinearPoly<T> {
        let mut out = MultilinearPoly::<T> {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (m, c) in self.terms() {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn to_float(&self) -> FloatPoly {
        self.map(S::to_f64)
    }

    /// Terms with the `k` largest `|coefficient|`, ties broken by canonical order.
    pub fn terms_by_magnitude(&self) -> Vec<(&Monomial, &S)> {
        let mut v: Vec<_> = self.terms().collect();
        // stable sort keeps canonical order among equal magnitudes
        v.sort_by(|a, b| {
            b.1.abs()
                .partial_cmp(&a.1.abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        v
    }
}

impl FloatPoly {
    /// Exact rational image of a float polynomial.
    pub fn to_rational(&self) -> RationalPoly {
        self.map(|c| super::scalar::rational_from_f64(*c))
    }
}

/// Inverse of [`MultilinearPoly::values_table`]: `f_alpha = 2^-n sum_y f(y) y^alpha`.
pub fn fourier_coeffs<S: Scalar>(n: usize, values: &[S]) -> Result<MultilinearPoly<S>> {
    fourier_coeffs_with_limit(n, values, DEFAULT_EXHAUSTIVE_LIMIT)
}

pub fn fourier_coeffs_with_limit<S: Scalar>(
    n: usize,
    values: &[S],
    limit: usize,
) -> Result<MultilinearPoly<S>> {
    if n > limit || n >= 63 {
        return Err(FsosError::AboveExhaustiveLimit { n, limit });
    }
    let expected = 1usize << n;
    if values.len() != expected {
        return Err(FsosError::IncompleteTable {
            n,
            got: values.len(),
            expected,
        });
    }
    let mut v = values.to_vec();
    walsh_hadamard(&mut v);
    let scale = S::from_i64(expected as i64);
    let mut p = MultilinearPoly::zero(n)?;
    for (i, c) in v.into_iter().enumerate() {
        p.add_term(Monomial::from_low_bits(n, i as u64), c / scale.clone());
    }
    Ok(p)
}

/// Unnormalized in-place Walsh-Hadamard transform.
fn walsh_hadamard<S: Scalar>(v: &mut [S]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let s = a.clone() + b.clone();
                let d = a.clone() - b.clone();
                *a = s;
                *b = d;
            }
        }
        h *= 2;
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for MultilinearPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by(|a, b| a.0.graded_cmp(b.0));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for MultilinearPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms()).finish()
    }
}
