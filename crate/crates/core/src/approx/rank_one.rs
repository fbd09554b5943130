//! Single-square certificates built from univariate approximations of `sqrt`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::charfn::Objective;
use crate::decimal::{round_to_rational, SIGNIFICANT_DIGITS};
use crate::error::{FsosError, Result};
use crate::fourier::{ratio, FloatPoly, Rational, RationalPoly, Scalar};

use super::chebyshev::chebyshev_sqrt;
use super::newman::{newman_error_bound, newman_sqrt};
use super::UniPoly;

const MAX_EXTRA_DEGREE: usize = 60;

fn target_range(obj: &Objective) -> Result<(i64, i64)> {
    obj.target_range.ok_or_else(|| {
        FsosError::Hypothesis("the construction needs the exact image range from the oracle".into())
    })
}

fn round_poly(p: &FloatPoly) -> RationalPoly {
    p.map(|c| round_to_rational(*c, SIGNIFICANT_DIGITS))
}

/// Starting degree `floor((1 - log eps + log hi) / (2 + log lo - log(hi - lo)))`,
/// logarithms base 2, where `[lo, hi]` is the target's image.
pub fn poly_start_degree(lo: i64, hi: i64, eps: f64) -> usize {
    let (lo, hi) = (lo as f64, hi as f64);
    let num = 1.0 - eps.log2() + hi.log2();
    let den = 2.0 + lo.log2() - (hi - lo).log2();
    if den <= 0.0 || !num.is_finite() {
        return 0;
    }
    (num / den).floor().max(0.0) as usize
}

/// Largest `|P^2 - target|` over the cube, or the coefficient l1 norm when
/// `n` is above `limit` (the latter bounds the former).
fn square_error(p: &RationalPoly, target: &RationalPoly, limit: usize) -> Rational {
    let e = p.square().sub(target).expect("same width");
    if e.n() <= limit {
        e.linf_value_norm_with_limit(limit).expect("n within limit")
    } else {
        e.l1_coeff_norm()
    }
}

/// A single polynomial `P` with `|P^2 - target| < eps` everywhere.
///
/// `P = sqrt(hi) * c(target / hi)` for the Chebyshev interpolant `c` of `sqrt`
/// on `[lo/hi, 1]`. Requires `5 lo > hi` for the target's image `[lo, hi]`
/// (equivalently `L < (5 L_min - L_max) / 4` in MAXSAT mode).
pub fn rank_one_poly_certificate(obj: &Objective, eps: f64, limit: usize) -> Result<RationalPoly> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(FsosError::InvalidArgument(format!(
            "tolerance must lie in (0, 1), got {eps}"
        )));
    }
    let (lo, hi) = target_range(obj)?;
    if 5 * lo <= hi {
        return Err(FsosError::Hypothesis(format!(
            "target image [{lo}, {hi}] violates 5*min > max"
        )));
    }
    let n = obj.target.n();
    let eps_q = crate::fourier::rational_from_f64(eps);
    if lo == hi {
        let p = RationalPoly::constant(n, round_to_rational((lo as f64).sqrt(), SIGNIFICANT_DIGITS))?;
        if square_error(&p, &obj.target, limit) < eps_q {
            return Ok(p);
        }
        return Err(FsosError::Approximation("rounded constant root too coarse".into()));
    }
    let g = obj.target.scale(&ratio(1, hi)).to_float();
    let alpha = Rational::new(BigInt::from(lo), BigInt::from(hi));
    let start = poly_start_degree(lo, hi, eps);
    let root_hi = (hi as f64).sqrt();
    for d in start..=start + MAX_EXTRA_DEGREE {
        let cheb = chebyshev_sqrt(&alpha, &ratio(1, 1), d)?;
        let p = round_poly(&cheb.compose(&g).scale(&root_hi));
        let err = square_error(&p, &obj.target, limit);
        log::debug!("rank-one polynomial: d = {d}, error {}", err.to_f64());
        if err < eps_q {
            return Ok(p);
        }
    }
    Err(FsosError::Approximation(format!(
        "no degree up to {} reached tolerance {eps}",
        start + MAX_EXTRA_DEGREE
    )))
}

/// Rank-one rational certificate `f ~ g^2 / h^2`.
#[derive(Clone, Debug)]
pub struct RankOneRational {
    pub num: RationalPoly,
    pub den: RationalPoly,
    pub degree: usize,
    /// `max |f - g^2/h^2|` when it was checked exhaustively.
    pub linf_error: Option<Rational>,
}

/// Degree for which Newman's bound guarantees `|f - r(f)^2| <= 1/4` on `[0, m]`:
/// smallest `d` with `m e (2 + e) <= 1/4`, `e = 3 exp(-sqrt d)`.
pub fn rational_degree_bound(m: f64) -> usize {
    let mut d = 1;
    loop {
        let e = newman_error_bound(d);
        if m * e * (2.0 + e) <= 0.25 {
            return d;
        }
        d += 1;
    }
}

/// Newman's approximant rescaled to `[0, m]` with cleared denominators:
/// `g / h` with `g = c sqrt(m) (t/m) O(t/m)`, `h = c E(t/m)`, `c = (2m)^deg E`.
pub fn scaled_newman(d: usize, m: f64) -> Result<(UniPoly<f64>, UniPoly<f64>)> {
    let r = newman_sqrt(d)?;
    let c = (2.0 * m).powi(r.den.degree() as i32);
    let num = r
        .num
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| c * m.sqrt() * a / m.powi(i as i32))
        .collect();
    let den = r
        .den
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| c * a / m.powi(i as i32))
        .collect();
    Ok((UniPoly::new(num), UniPoly::new(den)))
}

/// Exact `max_y |f - g^2/h^2|`; `None` if `h` vanishes somewhere.
pub fn rational_linf_error(
    f: &RationalPoly,
    g: &RationalPoly,
    h: &RationalPoly,
    limit: usize,
) -> Result<Option<Rational>> {
    let fv = f.values_table(limit)?;
    let gv = g.values_table(limit)?;
    let hv = h.values_table(limit)?;
    let mut worst = Rational::zero();
    for ((fy, gy), hy) in fv.iter().zip(&gv).zip(&hv) {
        if hy.is_zero() {
            return Ok(None);
        }
        let e = (fy - gy * gy / (hy * hy)).abs();
        if e > worst {
            worst = e;
        }
    }
    Ok(Some(worst))
}

/// `g / h` with `g^2/h^2` within `1/4` of the shifted objective.
///
/// With `degree = None` the smallest Newman degree passing the exhaustive check
/// is used (capped by [`rational_degree_bound`]); above `limit` variables the
/// bound's degree is used unchecked.
pub fn rank_one_rational_certificate(
    obj: &Objective,
    degree: Option<usize>,
    limit: usize,
) -> Result<RankOneRational> {
    let (_, hi) = target_range(obj)?;
    let m = hi as f64 + obj.shift.to_f64();
    let n = obj.f.n();
    let bound = rational_degree_bound(m);
    let quarter = ratio(1, 4);
    let checkable = n <= limit;
    let degrees: Vec<usize> = match degree {
        Some(d) => vec![d],
        None if checkable => (1..=bound).collect(),
        None => vec![bound],
    };
    let f = obj.f.to_float();
    let mut last_err = None;
    for d in degrees {
        let (gu, hu) = scaled_newman(d, m)?;
        let num = round_poly(&gu.compose(&f));
        let den = round_poly(&hu.compose(&f));
        if !checkable {
            log::warn!("n = {n} above the exhaustive limit; rank-one error not checked");
            return Ok(RankOneRational {
                num,
                den,
                degree: d,
                linf_error: None,
            });
        }
        match rational_linf_error(&obj.f, &num, &den, limit)? {
            Some(e) if e <= quarter => {
                return Ok(RankOneRational {
                    num,
                    den,
                    degree: d,
                    linf_error: Some(e),
                })
            }
            Some(e) => last_err = Some(e.to_f64()),
            None => {
                return Err(FsosError::Approximation(format!(
                    "denominator vanishes on the cube at degree {d}"
                )))
            }
        }
    }
    Err(FsosError::Approximation(format!(
        "rank-one rational error {:?} exceeds 1/4",
        last_err
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::{objective, Mode};
    use crate::cnf::parse_dimacs;

    fn ex32() -> crate::cnf::CnfFormula {
        parse_dimacs("p cnf 3 4\n1 0\n2 0\n3 0\n-1 -2 -3 0\n").unwrap()
    }

    #[test]
    fn newman_rescaled_matches_closed_form() {
        // sqrt(10)(1 + xi) t / (2t + 5 xi)
        let (g, h) = scaled_newman(2, 2.5).unwrap();
        let xi = (-(0.5f64).sqrt()).exp();
        assert!((g.coeffs()[1] - 10f64.sqrt() * (1.0 + xi)).abs() < 1e-12);
        assert!((h.coeffs()[1] - 2.0).abs() < 1e-12);
        assert!((h.coeffs()[0] - 5.0 * xi).abs() < 1e-12);
        let r = |t: f64| g.eval(&t) / h.eval(&t);
        assert!((r(0.5) - 0.5f64.sqrt()).abs() < 0.026);
        assert!((r(1.5) - 1.5f64.sqrt()).abs() < 0.072);
        assert!((r(2.5) - 2.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn example_rational_certificate() {
        let obj = objective(&ex32(), Mode::Maxsat, None, 26).unwrap();
        let c = rank_one_rational_certificate(&obj, Some(2), 20).unwrap();
        assert!(c.linf_error.unwrap().to_f64() < 0.18);
        assert!((c.num.constant_term().to_f64() - 5.31).abs() < 5e-3);
        assert!((c.den.constant_term().to_f64() - 4.72).abs() < 5e-3);
    }

    #[test]
    fn auto_degree_rational() {
        let obj = objective(&ex32(), Mode::Maxsat, None, 26).unwrap();
        let c = rank_one_rational_certificate(&obj, None, 20).unwrap();
        assert!(c.degree <= rational_degree_bound(2.5));
        assert!(c.linf_error.unwrap() <= ratio(1, 4));
    }

    #[test]
    fn poly_hypothesis_enforced() {
        let obj = objective(&ex32(), Mode::Maxsat, None, 26).unwrap();
        assert!(matches!(
            rank_one_poly_certificate(&obj, 0.5, 20),
            Err(FsosError::Hypothesis(_))
        ));
        assert!(rank_one_poly_certificate(&obj, 1.0, 20).is_err());
    }

    #[test]
    fn poly_certificate_when_gap_is_wide() {
        // x1 four times, not-x1 four times, x2: image {4, 5}, L = 0
        let phi = parse_dimacs("p cnf 2 9\n1 0\n1 0\n1 0\n1 0\n-1 0\n-1 0\n-1 0\n-1 0\n2 0\n").unwrap();
        let obj = objective(&phi, Mode::Maxsat, Some(0), 26).unwrap();
        assert_eq!(obj.target_range, Some((4, 5)));
        let p = rank_one_poly_certificate(&obj, 0.5, 20).unwrap();
        let err = p.square().sub(&obj.target).unwrap().linf_value_norm().unwrap();
        assert!(err < ratio(1, 2));
    }

    #[test]
    fn constant_objective() {
        let phi = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
        let obj = objective(&phi, Mode::Maxsat, Some(0), 26).unwrap();
        let p = rank_one_poly_certificate(&obj, 0.1, 20).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p.constant_term().to_f64() - 1.0).abs() < 1e-11);
    }
}
