use num_rational::Ratio;

use crate::error::{FsosError, Result};
use crate::fourier::{Monomial, MultilinearPoly, Scalar};

/// Truncation ratio in `(0, 1]`, kept exact so `floor(D * rho)` is reproducible.
pub type Rho = Ratio<u64>;

/// The sweep `{1/3, 1/2, 2/3, 3/4, 4/5, 1}`.
pub fn default_rho_schedule() -> Vec<Rho> {
    [(1, 3), (1, 2), (2, 3), (3, 4), (4, 5), (1, 1)]
        .into_iter()
        .map(|(a, b)| Rho::new(a, b))
        .collect()
}

/// Parses `a/b` or a plain decimal such as `0.75`.
pub fn parse_rho(s: &str) -> Result<Rho> {
    let bad = || FsosError::InvalidArgument(format!("bad truncation ratio {s:?}"));
    let r = if let Some((a, b)) = s.split_once('/') {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        Rho::new(a, b)
    } else {
        let (int, frac) = s.trim().split_once('.').unwrap_or((s.trim(), ""));
        if frac.len() > 12 || (int.is_empty() && frac.is_empty()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let i: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let f: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        Rho::new(i * den + f, den)
    };
    if r == Rho::from_integer(0) || r > Rho::from_integer(1) {
        return Err(bad());
    }
    Ok(r)
}

/// Number of terms kept: `max(1, floor(D * rho))`.
pub fn truncated_len(d: usize, rho: Rho) -> usize {
    let kept = (d as u128 * *rho.numer() as u128) / *rho.denom() as u128;
    (kept as usize).max(1)
}

/// Keeps the `floor(D * rho)` largest-magnitude terms (at least one).
/// Equal magnitudes are ordered by the canonical monomial order.
pub fn rho_truncate<S: Scalar>(p: &MultilinearPoly<S>, rho: Rho) -> MultilinearPoly<S> {
    let keep = truncated_len(p.len(), rho);
    let terms = p
        .terms_by_magnitude()
        .into_iter()
        .take(keep)
        .map(|(m, c)| (m.clone(), c.clone()));
    MultilinearPoly::from_terms(p.n(), terms).expect("terms of an existing polynomial")
}

/// Smallest `s` such that every monomial of `supp(f)` lies among the first
/// `s` terms of `p` sorted by magnitude; `None` if some monomial is missing.
pub fn minimal_support_len<S: Scalar, T: Scalar>(
    p: &MultilinearPoly<S>,
    f: &MultilinearPoly<T>,
) -> Option<usize> {
    let order: std::collections::HashMap<&Monomial, usize> = p
        .terms_by_magnitude()
        .into_iter()
        .enumerate()
        .map(|(i, (m, _))| (m, i))
        .collect();
    let mut need = 0;
    for m in f.support() {
        need = need.max(*order.get(m)? + 1);
    }
    Some(need)
}
