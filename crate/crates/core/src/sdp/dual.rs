//! Exact lower bounds for the polynomial l1 program.
//!
//! For `min ||A(U) - f||_1` over `U >= 0`, any `y` with `|y|_inf <= 1` and
//! `M(y) = (y_{a xor b})_{a,b in S} >= 0` gives
//! `||A(U) - f||_1 >= <y, A(U) - f> = <M(y), U> - <y, f> >= -<y, f>`.

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use super::{min_eigenvalue, GramProblem, ProblemKind};
use crate::decimal::round_to_rational;
use crate::error::{FsosError, Result};
use crate::fourier::{Monomial, Rational, RationalPoly};
use crate::validate::psd_rational;

/// A verified lower bound on the optimal residual.
#[derive(Clone, Debug)]
pub struct DualBound {
    pub bound: Rational,
    /// The certifying multipliers, indexed like the program's `Lambda`.
    pub y: Vec<(Monomial, Rational)>,
}

fn moment_matrix<T: Clone>(prob: &GramProblem, y: &[T]) -> Vec<Vec<T>> {
    prob.s
        .iter()
        .map(|a| prob.s.iter().map(|b| y[prob.index[&a.xor(b)]].clone()).collect())
        .collect()
}

fn repaired(prob: &GramProblem, hint: &[f64], bump: f64) -> Vec<f64> {
    let mut y = hint.to_vec();
    let zero = prob.index[&Monomial::one(prob.n)];
    let m = moment_matrix(prob, &y);
    let s = prob.s.len();
    let dm = DMatrix::from_fn(s, s, |i, j| m[i][j]);
    let lam = min_eigenvalue(&dm);
    // y_0 sits on the diagonal only, so raising it shifts the spectrum
    y[zero] += (-lam).max(0.0) + bump;
    let peak = y.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    y.iter_mut().for_each(|v| *v /= peak);
    y
}

fn exact_bound(prob: &GramProblem, f: &RationalPoly, y: &[f64]) -> Option<DualBound> {
    let one = Rational::one();
    let yr: Vec<Rational> = y
        .iter()
        .map(|&v| {
            let r = round_to_rational(v, 10);
            if r > one {
                one.clone()
            } else if r < -one.clone() {
                -one.clone()
            } else {
                r
            }
        })
        .collect();
    let m = moment_matrix(prob, &yr);
    if !psd_rational(&m).psd {
        return None;
    }
    let mut bound = Rational::zero();
    for (g, c) in f.terms() {
        if let Some(&i) = prob.index.get(g) {
            bound -= &yr[i] * c;
        }
    }
    Some(DualBound {
        bound,
        y: prob.lambda.iter().cloned().zip(yr).collect(),
    })
}

/// Turns an approximate dual vector into an exactly verified lower bound on
/// the minimum residual of the polynomial program.
///
/// `f` must be the exact objective whose float image the program was built
/// from. Both signs of the hint are tried and the better bound returned.
pub fn min_l1_dual_bound(prob: &GramProblem, f: &RationalPoly, hint: &[f64]) -> Result<Option<DualBound>> {
    if prob.kind != ProblemKind::MinL1Poly {
        return Err(FsosError::InvalidArgument(
            "dual bounds are available for the polynomial program only".into(),
        ));
    }
    if hint.len() != prob.lambda.len() {
        return Err(FsosError::InvalidArgument(format!(
            "dual hint has {} entries, expected {}",
            hint.len(),
            prob.lambda.len()
        )));
    }
    for g in f.support() {
        if !prob.index.contains_key(g) {
            return Err(FsosError::InvalidArgument(format!("monomial {g} of f is outside Lambda")));
        }
    }
    let neg: Vec<f64> = hint.iter().map(|v| -v).collect();
    let mut best: Option<DualBound> = None;
    for h in [hint, &neg[..]] {
        let mut bump = 1e-9;
        for _ in 0..8 {
            if let Some(b) = exact_bound(prob, f, &repaired(prob, h, bump)) {
                if best.as_ref().is_none_or(|x| b.bound > x.bound) {
                    best = Some(b);
                }
                break;
            }
            bump *= 10.0;
        }
    }
    Ok(best.filter(|b| !b.bound.is_negative()))
}
