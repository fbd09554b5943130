use crate::error::{FsosError, Result};

use super::{UniPoly, UniRational};

/// Newman's rational approximation of `sqrt(t)` on `[0, 1]`.
///
/// With `xi = exp(-1/sqrt(d))` and `p(x) = prod_{k<d} (x + xi^k) = E(x^2) + x O(x^2)`,
/// Newman's `x (p(x) - p(-x)) / (p(x) + p(-x))` approximates `|x|`; substituting
/// `x = sqrt(t)` gives `t O(t) / E(t)`. Error at most `3 exp(-sqrt(d))`.
pub fn newman_sqrt(d: usize) -> Result<UniRational<f64>> {
    if d == 0 {
        return Err(FsosError::InvalidArgument("Newman degree must be positive".into()));
    }
    let xi = (-1.0 / (d as f64).sqrt()).exp();
    let mut p = vec![1.0];
    for k in 0..d {
        let r = xi.powi(k as i32);
        let mut next = vec![0.0; p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i] += c * r;
            next[i + 1] += c;
        }
        p = next;
    }
    let even: Vec<f64> = p.iter().step_by(2).copied().collect();
    let mut num = vec![0.0];
    num.extend(p.iter().skip(1).step_by(2).copied());
    Ok(UniRational {
        num: UniPoly::new(num),
        den: UniPoly::new(even),
    })
}

/// `3 exp(-sqrt(d))`.
pub fn newman_error_bound(d: usize) -> f64 {
    3.0 * (-(d as f64).sqrt()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_error(r: &UniRational<f64>) -> f64 {
        (0..=1000)
            .map(|i| {
                let t = i as f64 / 1000.0;
                (r.eval(&t) - t.sqrt()).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn bound_holds_on_grid() {
        for d in [1, 2, 3, 9, 16] {
            let r = newman_sqrt(d).unwrap();
            assert!(grid_error(&r) <= newman_error_bound(d), "d = {d}");
        }
    }

    #[test]
    fn degree_two_closed_form() {
        // (x+1)(x+xi): E(t) = t + xi, O(t) = 1 + xi
        let r = newman_sqrt(2).unwrap();
        let xi = (-(0.5f64).sqrt()).exp();
        assert_eq!(r.den.coeffs().len(), 2);
        assert!((r.den.coeffs()[0] - xi).abs() < 1e-15);
        assert!((r.num.coeffs()[1] - (1.0 + xi)).abs() < 1e-15);
    }

    #[test]
    fn denominator_has_positive_coefficients() {
        for d in 1..30 {
            assert!(newman_sqrt(d).unwrap().den.coeffs().iter().all(|&c| c > 0.0));
        }
    }
}
