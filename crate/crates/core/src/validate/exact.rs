//! Integer-backed exact arithmetic for the validators.
//!
//! Each polynomial is written as `num / den` with integer numerators. Products
//! run on `i128` while the operands fit in `i64` and fall back to `BigInt`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::fourier::{Monomial, Rational, RationalPoly};

#[derive(Clone, Debug)]
enum Num {
    Small(i64),
    Big(BigInt),
}

impl Num {
    fn from_big(b: BigInt) -> Num {
        match b.to_i64() {
            Some(v) => Num::Small(v),
            None => Num::Big(b),
        }
    }

    fn to_big(&self) -> BigInt {
        match self {
            Num::Small(v) => BigInt::from(*v),
            Num::Big(b) => b.clone(),
        }
    }
}

/// Accumulator that stays in `i128` until it would overflow.
#[derive(Clone, Debug, Default)]
pub(crate) struct Wide {
    small: i128,
    big: Option<BigInt>,
}

impl Wide {
    fn add_i128(&mut self, v: i128) {
        match self.small.checked_add(v) {
            Some(s) => self.small = s,
            None => {
                let b = self.big.get_or_insert_with(BigInt::zero);
                *b += BigInt::from(self.small) + BigInt::from(v);
                self.small = 0;
            }
        }
    }

    fn add_big(&mut self, v: BigInt) {
        let b = self.big.get_or_insert_with(BigInt::zero);
        *b += v;
    }

    fn add_product(&mut self, a: &Num, b: &Num, times: i128) {
        match (a, b) {
            (Num::Small(x), Num::Small(y)) => {
                let p = *x as i128 * *y as i128;
                match p.checked_mul(times) {
                    Some(v) => self.add_i128(v),
                    None => self.add_big(BigInt::from(p) * times),
                }
            }
            _ => self.add_big(a.to_big() * b.to_big() * times),
        }
    }

    fn merge(&mut self, other: Wide) {
        self.add_i128(other.small);
        if let Some(b) = other.big {
            self.add_big(b);
        }
    }

    pub(crate) fn into_big(self) -> BigInt {
        let mut v = BigInt::from(self.small);
        if let Some(b) = self.big {
            v += b;
        }
        v
    }
}

/// `p = terms / den` with integer numerators.
#[derive(Clone, Debug)]
pub(crate) struct IntPoly {
    pub den: BigInt,
    terms: Vec<(Monomial, Num)>,
}

impl IntPoly {
    pub fn new(p: &RationalPoly) -> IntPoly {
        let den = p
            .terms()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let terms = p
            .terms()
            .map(|(m, c)| {
                let scaled = c.numer() * (&den / c.denom());
                (m.clone(), Num::from_big(scaled))
            })
            .collect();
        IntPoly { den, terms }
    }

    /// Numerator of `p(y)` at the point with `-1` entries `neg`.
    pub fn eval_num(&self, neg: &Monomial) -> BigInt {
        let mut acc = Wide::default();
        for (m, c) in &self.terms {
            let sign = if m.odd_overlap(neg) { -1 } else { 1 };
            match c {
                Num::Small(v) => acc.add_i128(sign * *v as i128),
                Num::Big(b) => acc.add_big(if sign < 0 { -b.clone() } else { b.clone() }),
            }
        }
        acc.into_big()
    }

    /// Numerator values at all `2^n` points (index bit `i` = `y_{i+1} = -1`).
    pub fn values_num(&self, n: usize) -> Vec<BigInt> {
        let size = 1usize << n;
        let bound: u128 = self
            .terms
            .iter()
            .map(|(_, c)| match c {
                Num::Small(v) => v.unsigned_abs() as u128,
                Num::Big(_) => u128::MAX / 2,
            })
            .fold(0u128, |a, b| a.saturating_add(b));
        if bound < (1u128 << 126) {
            let mut v = vec![0i128; size];
            for (m, c) in &self.terms {
                if let Num::Small(x) = c {
                    v[m.low_bits() as usize] = *x as i128;
                }
            }
            wht(&mut v, |a, b| (a + b, a - b));
            v.into_iter().map(BigInt::from).collect()
        } else {
            let mut v = vec![BigInt::zero(); size];
            for (m, c) in &self.terms {
                v[m.low_bits() as usize] = c.to_big();
            }
            wht(&mut v, |a, b| (&a + &b, a - b));
            v
        }
    }
}

fn wht<T: Clone>(v: &mut [T], butterfly: impl Fn(T, T) -> (T, T)) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = butterfly(a.clone(), b.clone());
                *a = s;
                *b = d;
            }
        }
        h *= 2;
    }
}

type Group = HashMap<Monomial, Wide>;

fn square_into(p: &IntPoly, acc: &mut Group) {
    let t = &p.terms;
    for i in 0..t.len() {
        let (mi, ci) = &t[i];
        acc.entry(mi.xor(mi)).or_default().add_product(ci, ci, 1);
        for (mj, cj) in &t[i + 1..] {
            acc.entry(mi.xor(mj)).or_default().add_product(ci, cj, 2);
        }
    }
}

/// `sum_j p_j^2`, exactly.
pub(crate) fn sum_of_squares(n: usize, polys: &[RationalPoly]) -> RationalPoly {
    let ints: Vec<IntPoly> = polys.iter().map(IntPoly::new).collect();
    // polynomials sharing a denominator accumulate together
    let mut by_den: BTreeMap<BigInt, Vec<&IntPoly>> = BTreeMap::new();
    for p in &ints {
        by_den.entry(p.den.clone()).or_default().push(p);
    }
    let mut out = RationalPoly::zero(n).expect("validated width");
    for (den, group) in by_den {
        let acc = group
            .par_iter()
            .fold(Group::new, |mut acc, p| {
                square_into(p, &mut acc);
                acc
            })
            .reduce(Group::new, |mut a, b| {
                for (m, w) in b {
                    a.entry(m).or_default().merge(w);
                }
                a
            });
        let den2 = &den * &den;
        for (m, w) in acc {
            let v = w.into_big();
            if !v.is_zero() {
                out.add_term(m, Rational::new(v, den2.clone()));
            }
        }
    }
    out
}

/// Exact `a * b` in the group algebra, integer-backed.
pub(crate) fn product(a: &RationalPoly, b: &RationalPoly) -> RationalPoly {
    let ia = IntPoly::new(a);
    let ib = IntPoly::new(b);
    let mut acc: Group = HashMap::new();
    for (ma, ca) in &ia.terms {
        for (mb, cb) in &ib.terms {
            acc.entry(ma.xor(mb)).or_default().add_product(ca, cb, 1);
        }
    }
    let den = &ia.den * &ib.den;
    let mut out = RationalPoly::zero(a.n()).expect("validated width");
    for (m, w) in acc {
        out.add_term(m, Rational::new(w.into_big(), den.clone()));
    }
    out
}

/// Sum over a family of polynomials of `p(y)^2`, as exact values at all points.
pub(crate) fn sum_of_squares_values(n: usize, polys: &[RationalPoly]) -> Vec<Rational> {
    let size = 1usize << n;
    let mut by_den: BTreeMap<BigInt, Vec<BigInt>> = BTreeMap::new();
    let partial: Vec<(BigInt, Vec<BigInt>)> = polys
        .par_iter()
        .map(|p| {
            let ip = IntPoly::new(p);
            let vals = ip.values_num(n);
            (ip.den, vals.into_iter().map(|v| &v * &v).collect())
        })
        .collect();
    for (den, sq) in partial {
        let slot = by_den.entry(den).or_insert_with(|| vec![BigInt::zero(); size]);
        for (s, v) in slot.iter_mut().zip(sq) {
            *s += v;
        }
    }
    let mut out = vec![Rational::zero(); size];
    for (den, sums) in by_den {
        let den2 = &den * &den;
        for (o, s) in out.iter_mut().zip(sums) {
            *o += Rational::new(s, den2.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decimal::parse_decimal;
    use crate::fourier::ratio;

    fn p(terms: &[(&[usize], &str)]) -> RationalPoly {
        RationalPoly::from_var_terms(
            3,
            terms.iter().map(|(v, c)| (v.to_vec(), parse_decimal(c).unwrap())),
        )
        .unwrap()
    }

    #[test]
    fn sum_of_squares_matches_naive() {
        let a = p(&[(&[], "0.5274"), (&[1], "1.116"), (&[2, 3], "-0.0396")]);
        let b = p(&[(&[3], "3e-20"), (&[1, 2, 3], "123456789012345678")]);
        let c = RationalPoly::from_var_terms(3, vec![(vec![2], ratio(1, 3))]).unwrap();
        let polys = vec![a.clone(), b.clone(), c.clone()];
        let want = a.square().add(&b.square()).unwrap().add(&c.square()).unwrap();
        assert_eq!(sum_of_squares(3, &polys), want);
        let vals = sum_of_squares_values(3, &polys);
        assert_eq!(vals, want.values_table(20).unwrap());
    }

    #[test]
    fn product_matches_naive() {
        let a = p(&[(&[], "0.5"), (&[1], "-1.25")]);
        let b = RationalPoly::from_var_terms(3, vec![(vec![1], ratio(3, 8)), (vec![], ratio(-1, 7))])
            .unwrap();
        assert_eq!(product(&a, &b), a.xor_mul(&b).unwrap());
    }

    #[test]
    fn wide_accumulator_overflows_into_bigint() {
        let mut w = Wide::default();
        w.add_i128(i128::MAX);
        w.add_i128(i128::MAX);
        assert_eq!(w.into_big(), BigInt::from(i128::MAX) * 2);
    }

    #[test]
    fn eval_num_matches_eval() {
        let a = p(&[(&[], "0.5"), (&[1, 3], "-1.25"), (&[2], "7")]);
        let ia = IntPoly::new(&a);
        for bits in 0..8u64 {
            let neg = Monomial::from_low_bits(3, bits);
            assert_eq!(Rational::new(ia.eval_num(&neg), ia.den.clone()), a.eval_at(&neg));
        }
    }
}
