//! Exact validators for FSOS certificates.
//!
//! All three methods parse the certificate into rationals and never touch
//! floating point. With `f = target + s` for the certificate's shift `s`:
//!
//! * `l1`: `E = sum h^2 * f - sum g^2` satisfies `||E||_1 < 1 - s`, and an exact
//!   Gram check proves `sum h^2 >= 1`.
//! * `sampling`: the residual is tiny on all low-weight points, so by the
//!   extrapolation bound it stays below `1 - s` everywhere; same Gram check.
//! * `exhaustive`: `|sum g^2 - sum h^2 * f| < (1 - s) * sum h^2` and
//!   `sum h^2 > 0` at every point of the cube.
//!
//! Each gives `target > -1` on the cube, hence `target >= 0`.

mod exact;
mod extrapolation;
mod ldl;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::certify::Certificate;
use crate::charfn::{target_poly, Mode};
use crate::cnf::{Assignment, CnfFormula};
use crate::error::{FsosError, Result};
use crate::fourier::{Monomial, Rational, RationalPoly, Scalar, DEFAULT_EXHAUSTIVE_LIMIT};

pub(crate) use exact::{product, sum_of_squares};
pub use extrapolation::{
    extrapolation_bound, extrapolation_bound_general, extrapolation_bound_relaxed,
    low_weight_count,
};
pub use ldl::{psd_integer, psd_rational, LdlOutcome};

/// Largest sample set the sampling validator will enumerate by default.
pub const DEFAULT_SAMPLE_BUDGET: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    L1,
    Sampling,
    Exhaustive,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::L1 => "l1",
            Method::Sampling => "sampling",
            Method::Exhaustive => "exhaustive",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = FsosError;

    fn from_str(s: &str) -> Result<Method> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Method::L1),
            "sampling" => Ok(Method::Sampling),
            "exhaustive" => Ok(Method::Exhaustive),
            other => Err(FsosError::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Accepted,
    ResidualTooLarge,
    DenominatorUnproven,
    Inapplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accepted => "ACCEPTED",
            Verdict::ResidualTooLarge => "RESIDUAL_TOO_LARGE",
            Verdict::DenominatorUnproven => "DENOMINATOR_UNPROVEN",
            Verdict::Inapplicable => "INAPPLICABLE",
        })
    }
}

fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DenominatorMethod {
    /// `V' - I/|T| >= 0` for the Gram matrix `V' = H^T H` of the `h_i`.
    ExactLdl,
    /// `sum h^2 > 0` checked at every point.
    Pointwise,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenominatorCheck {
    pub method: DenominatorMethod,
    /// Smallest LDL pivot of `V' - I/|T|`, or the smallest value of `sum h^2`.
    #[serde(serialize_with = "ser_rational")]
    pub margin: Rational,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub mode: Mode,
    #[serde(rename = "L")]
    pub l: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub method: Method,
    pub accepted: bool,
    pub verdict: Verdict,
    /// l1 norm of `E`, largest sampled `|R|`, or largest `|R| / sum h^2`.
    #[serde(serialize_with = "ser_rational")]
    pub residual: Rational,
    /// Acceptance requires `residual < tolerance` (`<=` for sampling).
    #[serde(serialize_with = "ser_rational")]
    pub tolerance: Rational,
    pub residual_approx: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub denominator_check: Option<DenominatorCheck>,
    pub points_checked: u64,
    pub claim: Claim,
    /// Worst point, as a DIMACS literal list.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl ValidationReport {
    fn new(method: Method, cert: &Certificate) -> ValidationReport {
        ValidationReport {
            method,
            accepted: false,
            verdict: Verdict::Inapplicable,
            residual: Rational::zero(),
            tolerance: Rational::zero(),
            residual_approx: 0.0,
            denominator_check: None,
            points_checked: 0,
            claim: Claim {
                mode: cert.mode,
                l: cert.l,
            },
            witness: None,
            message: None,
        }
    }

    fn finish(mut self, residual_ok: bool) -> ValidationReport {
        self.residual_approx = Scalar::to_f64(&self.residual);
        let denom_ok = self.denominator_check.as_ref().is_none_or(|d| d.passed);
        self.verdict = match (residual_ok, denom_ok) {
            (false, _) => Verdict::ResidualTooLarge,
            (true, false) => Verdict::DenominatorUnproven,
            (true, true) => Verdict::Accepted,
        };
        self.accepted = self.verdict == Verdict::Accepted;
        self
    }

    fn inapplicable(mut self, message: String) -> ValidationReport {
        self.verdict = Verdict::Inapplicable;
        self.accepted = false;
        self.message = Some(message);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Runs the chosen method.
pub fn validate(phi: &CnfFormula, cert: &Certificate, method: Method) -> Result<ValidationReport> {
    match method {
        Method::L1 => validate_l1(phi, cert),
        Method::Sampling => validate_sampling(phi, cert),
        Method::Exhaustive => validate_exhaustive(phi, cert),
    }
}

/// `f = target + shift` and the slack `1 - shift`.
fn prepare(phi: &CnfFormula, cert: &Certificate) -> Result<(RationalPoly, Rational)> {
    cert.check_formula(phi)?;
    if !(cert.shift >= Rational::zero() && cert.shift < Rational::one()) {
        return Err(FsosError::Format(format!(
            "shift {} must lie in [0, 1)",
            cert.shift
        )));
    }
    for p in cert.numerators.iter().chain(&cert.denominators) {
        if p.n() != cert.n {
            return Err(FsosError::WidthMismatch {
                left: p.n(),
                right: cert.n,
            });
        }
    }
    let f = target_poly(phi, cert.mode, cert.l).add_constant(cert.shift.clone());
    Ok((f, Rational::one() - &cert.shift))
}

fn denominator_sum(cert: &Certificate) -> Result<RationalPoly> {
    if cert.is_polynomial() {
        RationalPoly::constant(cert.n, Rational::one())
    } else {
        Ok(sum_of_squares(cert.n, &cert.denominators))
    }
}

/// Exact check of `H^T H - I/|T| >= 0`, which gives `sum h^2 >= 1` pointwise.
pub fn denominator_gram_check(cert: &Certificate) -> DenominatorCheck {
    if cert.is_polynomial() {
        return DenominatorCheck {
            method: DenominatorMethod::ExactLdl,
            margin: Rational::zero(),
            passed: true,
        };
    }
    let mut support: Vec<Monomial> = cert
        .denominators
        .iter()
        .flat_map(|h| h.support().cloned())
        .collect();
    support.sort();
    support.dedup();
    let t = support.len();
    if t == 0 {
        // every h is zero, so sum h^2 = 0 < 1
        return DenominatorCheck {
            method: DenominatorMethod::ExactLdl,
            margin: -Rational::one(),
            passed: false,
        };
    }
    let den = cert
        .denominators
        .iter()
        .flat_map(|h| h.terms().map(|(_, c)| c.denom().clone()))
        .fold(BigInt::one(), |a, b| a.lcm(&b));
    let rows: Vec<Vec<BigInt>> = cert
        .denominators
        .iter()
        .map(|h| {
            support
                .iter()
                .map(|m| {
                    let c = h.coeff(m);
                    c.numer() * (&den / c.denom())
                })
                .collect()
        })
        .collect();
    // |T| * Hint^T Hint - den^2 I, with Hint = den * H
    let tb = BigInt::from(t);
    let den2 = &den * &den;
    let mut gram = vec![vec![BigInt::zero(); t]; t];
    for a in 0..t {
        for b in a..t {
            let s: BigInt = rows.iter().map(|r| &r[a] * &r[b]).sum();
            let mut v = &tb * s;
            if a == b {
                v -= &den2;
            }
            gram[a][b] = v.clone();
            gram[b][a] = v;
        }
    }
    let out = psd_integer(gram);
    DenominatorCheck {
        method: DenominatorMethod::ExactLdl,
        margin: out.min_pivot / Rational::from_integer(&tb * &den2),
        passed: out.psd,
    }
}

/// l1-norm validation: `||sum h^2 f - sum g^2||_1 < 1 - shift` plus the Gram check.
pub fn validate_l1(phi: &CnfFormula, cert: &Certificate) -> Result<ValidationReport> {
    let (f, slack) = prepare(phi, cert)?;
    let hsum = denominator_sum(cert)?;
    let gsum = sum_of_squares(cert.n, &cert.numerators);
    let e = product(&hsum, &f).sub(&gsum)?;
    let mut report = ValidationReport::new(Method::L1, cert);
    report.residual = e.l1_coeff_norm();
    report.tolerance = slack;
    report.denominator_check = Some(denominator_gram_check(cert));
    let ok = report.residual < report.tolerance;
    Ok(report.finish(ok))
}

fn assignment_of(n: usize, neg: &Monomial) -> Assignment {
    Assignment((0..n).map(|i| neg.contains(i)).collect())
}

/// Sum of squares of a family at one point, exactly.
struct SquareSum {
    groups: Vec<(BigInt, Vec<exact::IntPoly>)>,
}

impl SquareSum {
    fn new(polys: &[RationalPoly]) -> SquareSum {
        let mut groups: Vec<(BigInt, Vec<exact::IntPoly>)> = Vec::new();
        for p in polys {
            let ip = exact::IntPoly::new(p);
            match groups.iter_mut().find(|(d, _)| *d == ip.den) {
                Some((_, g)) => g.push(ip),
                None => groups.push((ip.den.clone(), vec![ip])),
            }
        }
        SquareSum { groups }
    }

    fn eval(&self, neg: &Monomial) -> Rational {
        let mut out = Rational::zero();
        for (den, group) in &self.groups {
            let s: BigInt = group
                .iter()
                .map(|p| {
                    let v = p.eval_num(neg);
                    &v * &v
                })
                .sum();
            out += Rational::new(s, den * den);
        }
        out
    }
}

/// Positions of `+1` entries for every point with at most `max_plus` of them,
/// in weight order then lexicographic order, handed out in chunks.
fn for_each_low_weight_chunk(
    n: usize,
    max_plus: usize,
    chunk: usize,
    mut visit: impl FnMut(Vec<Monomial>),
) -> Result<()> {
    let all = Monomial::from_vars(n, &(1..=n).collect::<Vec<_>>())?;
    let mut buf = Vec::with_capacity(chunk);
    for w in 0..=max_plus.min(n) {
        let mut idx: Vec<usize> = (0..w).collect();
        loop {
            let mut neg = all.clone();
            for &i in &idx {
                neg.toggle(i);
            }
            buf.push(neg);
            if buf.len() == chunk {
                visit(std::mem::replace(&mut buf, Vec::with_capacity(chunk)));
            }
            // next w-combination of 0..n
            let mut k = w;
            while k > 0 && idx[k - 1] == n - w + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for j in k..w {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    if !buf.is_empty() {
        visit(buf);
    }
    Ok(())
}

/// Sampling validation with the default point budget.
pub fn validate_sampling(phi: &CnfFormula, cert: &Certificate) -> Result<ValidationReport> {
    validate_sampling_with_budget(phi, cert, DEFAULT_SAMPLE_BUDGET)
}

/// Checks `|sum g^2 - sum h^2 f| <= (1 - shift) / N^2` at the `N` points with
/// at most `D` entries equal to `+1`, where `D` bounds the residual's degree.
pub fn validate_sampling_with_budget(
    phi: &CnfFormula,
    cert: &Certificate,
    budget: u64,
) -> Result<ValidationReport> {
    let (f, slack) = prepare(phi, cert)?;
    let n = cert.n;
    let mut report = ValidationReport::new(Method::Sampling, cert);
    let gsum = sum_of_squares(n, &cert.numerators);
    let hsum = denominator_sum(cert)?;
    let k = phi.max_width();
    let d = gsum.degree().max(hsum.degree() + k);
    if d > n {
        return Ok(report.inapplicable(format!(
            "residual degree bound D = {d} exceeds n = {n}"
        )));
    }
    let count = low_weight_count(n, d);
    if count > BigInt::from(budget) {
        return Ok(report.inapplicable(format!(
            "{count} sample points exceed the budget of {budget}"
        )));
    }
    let count_u = count.to_u64().expect("checked against budget");
    let tol = slack / Rational::from_integer(&count * &count);
    let gs = SquareSum::new(&cert.numerators);
    let hs = (!cert.is_polynomial()).then(|| SquareSum::new(&cert.denominators));
    let residual_at = |neg: &Monomial| -> Rational {
        let h = hs.as_ref().map_or_else(Rational::one, |s| s.eval(neg));
        (gs.eval(neg) - h * f.eval_at(neg)).abs()
    };
    let mut worst: Option<(Rational, Monomial)> = None;
    for_each_low_weight_chunk(n, d, 4096, |pts| {
        let best = pts
            .par_iter()
            .map(|p| (residual_at(p), p))
            .reduce_with(|a, b| if b.0 > a.0 { b } else { a });
        if let Some((r, p)) = best {
            if worst.as_ref().is_none_or(|(w, _)| r > *w) {
                worst = Some((r, p.clone()));
            }
        }
    })?;
    let (residual, point) = worst.expect("at least one point");
    report.residual = residual;
    report.tolerance = tol;
    report.points_checked = count_u;
    report.denominator_check = Some(denominator_gram_check(cert));
    let ok = report.residual <= report.tolerance;
    if !ok {
        report.witness = Some(assignment_of(n, &point).to_string());
    }
    Ok(report.finish(ok))
}

/// Exhaustive validation with the default size limit.
pub fn validate_exhaustive(phi: &CnfFormula, cert: &Certificate) -> Result<ValidationReport> {
    validate_exhaustive_with_limit(phi, cert, DEFAULT_EXHAUSTIVE_LIMIT)
}

/// Checks `|sum g^2 - sum h^2 f| < (1 - shift) sum h^2` and `sum h^2 > 0` at
/// all `2^n` points.
pub fn validate_exhaustive_with_limit(
    phi: &CnfFormula,
    cert: &Certificate,
    limit: usize,
) -> Result<ValidationReport> {
    let (f, slack) = prepare(phi, cert)?;
    let n = cert.n;
    let mut report = ValidationReport::new(Method::Exhaustive, cert);
    if n > limit {
        return Ok(report.inapplicable(format!("n = {n} is above the exhaustive limit {limit}")));
    }
    let gv = exact::sum_of_squares_values(n, &cert.numerators);
    let hv = if cert.is_polynomial() {
        vec![Rational::one(); 1 << n]
    } else {
        exact::sum_of_squares_values(n, &cert.denominators)
    };
    let fv = f.values_table(limit)?;
    let rel: Vec<Option<Rational>> = (0..gv.len())
        .into_par_iter()
        .map(|i| {
            hv[i]
                .is_positive()
                .then(|| (&gv[i] - &hv[i] * &fv[i]).abs() / &hv[i])
        })
        .collect();
    let residual = rel.iter().flatten().max().cloned().unwrap_or_else(Rational::zero);
    // among failing points, report one where the claim itself is weakest
    let failing = |i: &usize| rel[*i].as_ref().is_none_or(|r| *r >= slack);
    let witness = (0..rel.len()).filter(failing).min_by(|a, b| fv[*a].cmp(&fv[*b]));
    let min_h = hv.iter().min().cloned().expect("nonempty cube");
    report.points_checked = 1u64 << n;
    report.residual = residual;
    report.tolerance = slack;
    report.denominator_check = Some(DenominatorCheck {
        method: DenominatorMethod::Pointwise,
        passed: min_h.is_positive(),
        margin: min_h,
    });
    report.witness = witness.map(|i| assignment_of(n, &Monomial::from_low_bits(n, i as u64)).to_string());
    let ok = report.residual < report.tolerance;
    Ok(report.finish(ok))
}
