use std::f64::consts::PI;

use num_traits::Signed;

use crate::error::{FsosError, Result};
use crate::fourier::{FloatPoly, Rational, Scalar};

use super::UniPoly;

/// Interpolant of `sqrt(t)` at the Chebyshev nodes of `[a, b]`, kept in the
/// Chebyshev basis `sum c_j T_j(x)` with `x = (2t - a - b) / (b - a)`.
#[derive(Clone, Debug)]
pub struct ChebyshevSqrt {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

/// Degree-`d` Chebyshev interpolant of `sqrt` on `[a, b]`, `0 < a < b`.
pub fn chebyshev_sqrt(a: &Rational, b: &Rational, d: usize) -> Result<ChebyshevSqrt> {
    if !a.is_positive() || b <= a {
        return Err(FsosError::InvalidArgument(format!(
            "Chebyshev interval needs 0 < a < b, got [{a}, {b}]"
        )));
    }
    let (a, b) = (a.to_f64(), b.to_f64());
    let k = d + 1;
    let nodes: Vec<f64> = (0..k)
        .map(|i| ((2 * i + 1) as f64 * PI / (2 * k) as f64).cos())
        .collect();
    let values: Vec<f64> = nodes
        .iter()
        .map(|x| (0.5 * (a + b) + 0.5 * (b - a) * x).sqrt())
        .collect();
    let coeffs = (0..k)
        .map(|j| {
            let s: f64 = (0..k)
                .map(|i| values[i] * ((j * (2 * i + 1)) as f64 * PI / (2 * k) as f64).cos())
                .sum();
            let c = 2.0 * s / k as f64;
            if j == 0 {
                c / 2.0
            } else {
                c
            }
        })
        .collect();
    Ok(ChebyshevSqrt { a, b, coeffs })
}

impl ChebyshevSqrt {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Nodes `t_k` at which the interpolant is exact.
    pub fn nodes(&self) -> Vec<f64> {
        let k = self.coeffs.len();
        (0..k)
            .map(|i| {
                let x = ((2 * i + 1) as f64 * PI / (2 * k) as f64).cos();
                0.5 * (self.a + self.b) + 0.5 * (self.b - self.a) * x
            })
            .collect()
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        let x = (2.0 * t - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + x * b1 - b2
    }

    /// Clenshaw recurrence with group-algebra products: `p(f)` on the cube.
    pub fn compose(&self, f: &FloatPoly) -> FloatPoly {
        let n = f.n();
        let x = f
            .scale(&(2.0 / (self.b - self.a)))
            .add_constant(-(self.a + self.b) / (self.b - self.a));
        let zero = FloatPoly::zero(n).expect("existing width");
        let (mut b1, mut b2) = (zero.clone(), zero);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = x
                .xor_mul(&b1)
                .expect("same width")
                .scale(&2.0)
                .sub(&b2)
                .expect("same width")
                .add_constant(c);
            b2 = b1;
            b1 = b0;
        }
        x.xor_mul(&b1)
            .expect("same width")
            .sub(&b2)
            .expect("same width")
            .add_constant(self.coeffs[0])
    }

    /// The same polynomial in the monomial basis of `t`.
    pub fn to_unipoly(&self) -> UniPoly<f64> {
        // x as a polynomial in t
        let x = vec![
            -(self.a + self.b) / (self.b - self.a),
            2.0 / (self.b - self.a),
        ];
        let mut t_prev = vec![1.0];
        let mut t_cur = x.clone();
        let mut out = vec![0.0; self.coeffs.len()];
        add_scaled(&mut out, &t_prev, self.coeffs[0]);
        if self.coeffs.len() > 1 {
            add_scaled(&mut out, &t_cur, self.coeffs[1]);
        }
        for &c in self.coeffs.iter().skip(2) {
            let mut next = mul(&x, &t_cur);
            for v in next.iter_mut() {
                *v *= 2.0;
            }
            for (v, p) in next.iter_mut().zip(&t_prev) {
                *v -= p;
            }
            add_scaled(&mut out, &next, c);
            t_prev = std::mem::replace(&mut t_cur, next);
        }
        UniPoly::new(out)
    }

    /// Interpolation error bound
    /// `((b-a)/2)^(d+1) max|f^(d+1)| / (2^d (d+1)!)` for `f = sqrt`.
    pub fn error_bound(&self) -> f64 {
        chebyshev_error_bound(self.a, self.b, self.degree())
    }
}

/// See [`ChebyshevSqrt::error_bound`].
pub fn chebyshev_error_bound(a: f64, b: f64, d: usize) -> f64 {
    let k = d + 1;
    // |sqrt^(k)(t)| = (2k-3)!! / 2^k * t^(1/2 - k), largest at t = a
    let mut log = (k as f64) * ((b - a) / 2.0).ln();
    let mut dfact = 0.0;
    let mut j = 2 * k as i64 - 3;
    while j > 1 {
        dfact += (j as f64).ln();
        j -= 2;
    }
    log += dfact - (k as f64) * 2f64.ln() + (0.5 - k as f64) * a.ln();
    log -= (d as f64) * 2f64.ln();
    log -= (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
    log.exp()
}

fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn add_scaled(out: &mut [f64], p: &[f64], s: f64) {
    for (o, v) in out.iter_mut().zip(p) {
        *o += s * v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::ratio;

    fn grid_error(c: &ChebyshevSqrt) -> f64 {
        let (a, b) = c.interval();
        (0..=1000)
            .map(|i| {
                let t = a + (b - a) * i as f64 / 1000.0;
                (c.eval(t) - t.sqrt()).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn degree_zero_is_midpoint_root() {
        let c = chebyshev_sqrt(&ratio(1, 4), &ratio(1, 1), 0).unwrap();
        assert!((c.eval(0.3) - (0.625f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exact_at_nodes() {
        let c = chebyshev_sqrt(&ratio(1, 4), &ratio(1, 1), 6).unwrap();
        for t in c.nodes() {
            assert!((c.eval(t) - t.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_error_within_bound() {
        for d in 0..12 {
            let c = chebyshev_sqrt(&ratio(1, 4), &ratio(1, 1), d).unwrap();
            assert!(grid_error(&c) <= c.error_bound() * (1.0 + 1e-9), "d = {d}");
        }
    }

    #[test]
    fn monomial_form_agrees() {
        let c = chebyshev_sqrt(&ratio(1, 5), &ratio(1, 1), 7).unwrap();
        let p = c.to_unipoly();
        for i in 0..=20 {
            let t = 0.2 + 0.04 * i as f64;
            assert!((p.eval(&t) - c.eval(t)).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_nonpositive_interval() {
        assert!(chebyshev_sqrt(&ratio(0, 1), &ratio(1, 1), 3).is_err());
    }
}
