use crate::fourier::{MultilinearPoly, Scalar};

/// Univariate polynomial `a_0 + a_1 t + ... + a_d t^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> UniPoly<S> {
    /// Trailing zeros are trimmed; an empty list is the zero polynomial.
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    /// `p(f)` on the cube by Horner's rule with group-algebra products.
    pub fn compose(&self, f: &MultilinearPoly<S>) -> MultilinearPoly<S> {
        let n = f.n();
        let mut acc = MultilinearPoly::zero(n).expect("width of an existing polynomial");
        for c in self.coeffs.iter().rev() {
            acc = acc.xor_mul(f).expect("same width").add_constant(c.clone());
        }
        acc
    }
}

/// Quotient `num / den` of univariate polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct UniRational<S> {
    pub num: UniPoly<S>,
    pub den: UniPoly<S>,
}

impl<S: Scalar> UniRational<S> {
    pub fn eval(&self, t: &S) -> S {
        self.num.eval(t) / self.den.eval(t)
    }
}

/// `p(f)` for a univariate `p`; see [`UniPoly::compose`].
pub fn compose<S: Scalar>(p: &UniPoly<S>, f: &MultilinearPoly<S>) -> MultilinearPoly<S> {
    p.compose(f)
}
