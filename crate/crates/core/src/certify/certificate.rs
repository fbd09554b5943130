use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::charfn::Mode;
use crate::cnf::CnfFormula;
use crate::decimal::{exact_decimal, format_sig, parse_decimal};
use crate::error::{FsosError, Result};
use crate::fourier::{Monomial, Rational, RationalPoly, Scalar};

pub const CERTIFICATE_VERSION: u32 = 1;

/// A polynomial or rational FSOS certificate for the claim `(mode, L)`:
/// `f = target + shift` is approximately `sum g_j^2 / sum h_i^2`.
///
/// An empty `denominators` list means the denominator is the constant 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub mode: Mode,
    pub l: i64,
    pub shift: Rational,
    pub n: usize,
    pub formula_digest: String,
    pub numerators: Vec<RationalPoly>,
    pub denominators: Vec<RationalPoly>,
    pub metadata: Metadata,
}

/// Provenance of a certificate. Never consulted by the validators.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub construction: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    pub s_size: usize,
    pub t_size: usize,
    /// Exact l1 residual measured by the builder, as a decimal approximation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub builder_residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver_iterations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub build_time_ms: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct WirePoly {
    support: Vec<Vec<usize>>,
    coeffs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireCertificate {
    version: u32,
    mode: Mode,
    #[serde(rename = "L")]
    l: i64,
    shift: String,
    n: usize,
    formula_digest: String,
    numerators: Vec<WirePoly>,
    denominators: Vec<WirePoly>,
    metadata: Metadata,
}

fn sorted_terms(p: &RationalPoly) -> Vec<(&Monomial, &Rational)> {
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|a, b| a.0.graded_cmp(b.0));
    terms
}

fn poly_to_wire(p: &RationalPoly) -> Result<WirePoly> {
    let mut support = Vec::with_capacity(p.len());
    let mut coeffs = Vec::with_capacity(p.len());
    for (m, c) in sorted_terms(p) {
        support.push(m.vars().collect());
        coeffs.push(exact_decimal(c).ok_or_else(|| {
            FsosError::Format(format!("coefficient {c} has no finite decimal expansion"))
        })?);
    }
    Ok(WirePoly { support, coeffs })
}

fn poly_from_wire(n: usize, w: &WirePoly) -> Result<RationalPoly> {
    if w.support.len() != w.coeffs.len() {
        return Err(FsosError::Format(format!(
            "{} monomials but {} coefficients",
            w.support.len(),
            w.coeffs.len()
        )));
    }
    let mut p = RationalPoly::zero(n)?;
    let mut seen = std::collections::HashSet::new();
    for (vars, c) in w.support.iter().zip(&w.coeffs) {
        let m = Monomial::from_vars(n, vars).map_err(|e| FsosError::Format(e.to_string()))?;
        if vars.windows(2).any(|v| v[0] >= v[1]) || !seen.insert(m.clone()) {
            return Err(FsosError::Format(format!(
                "monomial {vars:?} is not a strictly increasing, unique variable list"
            )));
        }
        p.add_term(m, parse_decimal(c)?);
    }
    Ok(p)
}

fn parse_fraction(s: &str) -> Result<Rational> {
    match s.split_once('/') {
        Some((a, b)) => {
            let a = parse_decimal(a)?;
            let b = parse_decimal(b)?;
            if b == Rational::from_i64(0) {
                return Err(FsosError::MalformedDecimal(s.into()));
            }
            Ok(a / b)
        }
        None => parse_decimal(s),
    }
}

impl Certificate {
    /// Pretty JSON, byte-stable: terms in graded order, decimals canonical.
    pub fn to_json(&self) -> Result<String> {
        let wire = WireCertificate {
            version: CERTIFICATE_VERSION,
            mode: self.mode,
            l: self.l,
            shift: self.shift.to_string(),
            n: self.n,
            formula_digest: self.formula_digest.clone(),
            numerators: self.numerators.iter().map(poly_to_wire).collect::<Result<_>>()?,
            denominators: self.denominators.iter().map(poly_to_wire).collect::<Result<_>>()?,
            metadata: self.metadata.clone(),
        };
        let mut s = serde_json::to_string_pretty(&wire)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        let probe: serde_json::Value = serde_json::from_str(text)?;
        if let Some(v) = probe.get("version").and_then(serde_json::Value::as_u64) {
            if v != CERTIFICATE_VERSION as u64 {
                return Err(FsosError::VersionMismatch {
                    found: v as u32,
                    expected: CERTIFICATE_VERSION,
                });
            }
        }
        let wire: WireCertificate = serde_json::from_value(probe)?;
        let numerators = wire
            .numerators
            .iter()
            .map(|w| poly_from_wire(wire.n, w))
            .collect::<Result<Vec<_>>>()?;
        let denominators = wire
            .denominators
            .iter()
            .map(|w| poly_from_wire(wire.n, w))
            .collect::<Result<Vec<_>>>()?;
        if wire.formula_digest.len() != 64 || !wire.formula_digest.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(FsosError::Format("formula_digest must be 64 hex digits".into()));
        }
        Ok(Certificate {
            mode: wire.mode,
            l: wire.l,
            shift: parse_fraction(&wire.shift)?,
            n: wire.n,
            formula_digest: wire.formula_digest,
            numerators,
            denominators,
            metadata: wire.metadata,
        })
    }

    /// Fails fast unless the certificate is bound to this formula.
    pub fn check_formula(&self, phi: &CnfFormula) -> Result<()> {
        let digest = phi.digest();
        if digest != self.formula_digest {
            return Err(FsosError::DigestMismatch {
                certificate: self.formula_digest.clone(),
                formula: digest,
            });
        }
        if phi.n() != self.n {
            return Err(FsosError::WidthMismatch {
                left: self.n,
                right: phi.n(),
            });
        }
        Ok(())
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominators.is_empty()
    }

    /// Human-readable listing in the usual `0.9 + 0.15*y1*y2 - ...` notation.
    pub fn render_human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "claim: {} with L = {} (n = {})", self.mode, self.l, self.n);
        let _ = writeln!(s, "formula sha256: {}", self.formula_digest);
        let kind = if self.is_polynomial() { "polynomial" } else { "rational" };
        let _ = writeln!(
            s,
            "{kind} certificate: f = f_phi - L + {} ~ sum g_j^2{}",
            self.shift,
            if self.is_polynomial() { "" } else { " / sum h_i^2" }
        );
        for (j, g) in self.numerators.iter().enumerate() {
            let _ = writeln!(s, "g{} = {}", j + 1, render_poly(g));
        }
        for (i, h) in self.denominators.iter().enumerate() {
            let _ = writeln!(s, "h{} = {}", i + 1, render_poly(h));
        }
        s
    }
}

/// Polynomial in graded order with 4 significant digits per coefficient.
pub fn render_poly(p: &RationalPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in sorted_terms(p).into_iter().enumerate() {
        let v = c.to_f64();
        let mag = format_sig(v.abs(), 4);
        match (i, v < 0.0) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        if m.is_one() {
            s.push_str(&mag);
        } else {
            let _ = write!(s, "{mag}*{m}");
        }
    }
    s
}
