use crate::error::{FsosError, Result};
use crate::fourier::{Rational, Scalar};

use super::simplex::{minimize, LpError};
use super::UniPoly;

/// Discrete best approximation of `sqrt(t)` on a finite point set.
#[derive(Clone, Debug)]
pub struct MinimaxResult {
    pub poly: UniPoly<f64>,
    /// Largest `|p(t_i) - sqrt(t_i)|` over the points.
    pub lambda: f64,
}

/// Degree-`d` polynomial minimizing `max_i |p(t_i) - sqrt(t_i)|`.
///
/// Solved as the linear program `min lambda` subject to
/// `|sum_j a_j t_i^j - sqrt(t_i)| <= lambda`, with the points rescaled into
/// `(0, 1]` for conditioning.
pub fn minimax_sqrt_at_points(points: &[Rational], d: usize) -> Result<MinimaxResult> {
    let t: Vec<f64> = points.iter().map(Scalar::to_f64).collect();
    minimax_sqrt_at_f64(&t, d)
}

/// The image points `{i + 1/2 : i = 0..=upper}` of a shifted integer objective.
pub fn half_integer_points(upper: i64) -> Vec<Rational> {
    (0..=upper.max(0))
        .map(|i| crate::fourier::ratio(2 * i + 1, 2))
        .collect()
}

fn minimax_sqrt_at_f64(t: &[f64], d: usize) -> Result<MinimaxResult> {
    if t.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(FsosError::InvalidArgument("minimax points must be positive".into()));
    }
    let mut sorted = t.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(FsosError::DegenerateLp("duplicate approximation points".into()));
    }
    if t.len() < d + 1 {
        return Err(FsosError::DegenerateLp(format!(
            "{} points cannot determine a degree-{d} approximation",
            t.len()
        )));
    }
    let scale = sorted[sorted.len() - 1];
    let k = d + 1;
    // variables: a+ (k), a- (k), lambda
    let nv = 2 * k + 1;
    let mut c = vec![0.0; nv];
    c[nv - 1] = 1.0;
    let mut rows = Vec::with_capacity(2 * t.len());
    let mut rhs = Vec::with_capacity(2 * t.len());
    for &ti in t {
        let s = ti / scale;
        let pow: Vec<f64> = (0..k).map(|j| s.powi(j as i32)).collect();
        let root = ti.sqrt();
        let mut up = vec![0.0; nv];
        let mut down = vec![0.0; nv];
        for j in 0..k {
            up[j] = pow[j];
            up[k + j] = -pow[j];
            down[j] = -pow[j];
            down[k + j] = pow[j];
        }
        up[nv - 1] = -1.0;
        down[nv - 1] = -1.0;
        rows.push(up);
        rhs.push(root);
        rows.push(down);
        rhs.push(-root);
    }
    let x = minimize(&c, &rows, &rhs).map_err(|e| match e {
        LpError::Infeasible | LpError::Unbounded => {
            FsosError::DegenerateLp(format!("minimax LP reported {e:?}"))
        }
        LpError::Stalled => FsosError::DegenerateLp("simplex pivot cap reached".into()),
    })?;
    let coeffs: Vec<f64> = (0..k)
        .map(|j| (x[j] - x[k + j]) / scale.powi(j as i32))
        .collect();
    let poly = UniPoly::new(coeffs);
    let lambda = t
        .iter()
        .map(|&ti| (poly.eval(&ti) - ti.sqrt()).abs())
        .fold(0.0, f64::max);
    Ok(MinimaxResult { poly, lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::ratio;

    fn close(p: &UniPoly<f64>, want: &[f64], tol: f64) {
        assert_eq!(p.coeffs().len(), want.len(), "{p:?}");
        for (a, b) in p.coeffs().iter().zip(want) {
            assert!((a - b).abs() < tol, "{p:?} vs {want:?}");
        }
    }

    #[test]
    fn single_point_constant() {
        let r = minimax_sqrt_at_points(&[ratio(9, 4)], 0).unwrap();
        close(&r.poly, &[1.5], 1e-12);
        assert!(r.lambda < 1e-12);
    }

    #[test]
    fn six_image_points() {
        let pts = half_integer_points(5);
        let r1 = minimax_sqrt_at_points(&pts, 1).unwrap();
        close(&r1.poly, &[0.653, 0.328], 1e-3);
        let r2 = minimax_sqrt_at_points(&pts, 2).unwrap();
        close(&r2.poly, &[0.479, 0.532, -0.0359], 1e-3);
        assert!(r2.lambda <= r1.lambda);
    }

    #[test]
    fn three_image_points() {
        let r = minimax_sqrt_at_points(&half_integer_points(2), 1).unwrap();
        close(&r.poly, &[0.5289, 0.437], 1e-3);
    }

    #[test]
    fn seven_points_differ() {
        // the literal 0..=6 point set has a different optimum
        let r = minimax_sqrt_at_points(&half_integer_points(6), 1).unwrap();
        close(&r.poly, &[0.684, 0.307], 2e-3);
    }

    #[test]
    fn equioscillates() {
        let pts = half_integer_points(9);
        let r = minimax_sqrt_at_points(&pts, 2).unwrap();
        let errs: Vec<f64> = pts
            .iter()
            .map(|p| {
                let t = p.to_f64();
                r.poly.eval(&t) - t.sqrt()
            })
            .collect();
        let extremal = errs.iter().filter(|e| (e.abs() - r.lambda).abs() < 1e-9).count();
        assert!(extremal >= 4, "{errs:?}");
    }

    #[test]
    fn rejects_duplicates() {
        assert!(matches!(
            minimax_sqrt_at_points(&[ratio(1, 2), ratio(1, 2)], 0),
            Err(FsosError::DegenerateLp(_))
        ));
    }
}
