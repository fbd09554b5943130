//! Fixture loading and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use fsos::certify::{Certificate, Metadata};
use fsos::charfn::Mode;
use fsos::cnf::{parse_dimacs, CnfFormula};
use fsos::decimal::parse_decimal;
use fsos::fourier::{Rational, RationalPoly};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn formula(name: &str) -> CnfFormula {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_dimacs(&text).unwrap()
}

/// Parses `0.5 - 2y1y3 + y2` style sums over `n` variables, exactly.
pub fn parse_poly(n: usize, text: &str) -> RationalPoly {
    let mut terms = Vec::new();
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let (term, tail) = body.split_at(end);
        rest = tail;
        let (coeff, vars) = match term.find('y') {
            Some(i) => (&term[..i], &term[i..]),
            None => (term, ""),
        };
        let mut c = if coeff.is_empty() {
            Rational::from_integer(1.into())
        } else {
            parse_decimal(coeff).unwrap()
        };
        if sign < 0 {
            c = -c;
        }
        let vs: Vec<usize> = vars.split('y').filter(|v| !v.is_empty()).map(|v| v.parse().unwrap()).collect();
        terms.push((vs, c));
    }
    RationalPoly::from_var_terms(n, terms).unwrap()
}

/// Reads a `.cert` fixture: `n`, `L`, `shift` headers then `g`/`h` lines.
pub fn certificate(name: &str, phi: &CnfFormula) -> Certificate {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    let (mut n, mut l, mut shift) = (0, 0, Rational::from_integer(0.into()));
    let (mut g, mut h) = (Vec::new(), Vec::new());
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (key, value) = line.split_once(' ').unwrap();
        match key {
            "n" => n = value.parse().unwrap(),
            "L" => l = value.parse().unwrap(),
            "shift" => shift = value.parse().unwrap(),
            "g" => g.push(parse_poly(n, value)),
            "h" => h.push(parse_poly(n, value)),
            other => panic!("unknown fixture key {other}"),
        }
    }
    assert_eq!(n, phi.n());
    Certificate {
        mode: Mode::Maxsat,
        l,
        shift,
        n,
        formula_digest: phi.digest(),
        numerators: g,
        denominators: h,
        metadata: Metadata {
            construction: "fixture".into(),
            ..Metadata::default()
        },
    }
}

/// Falsified clauses under `assignment` (bit `v - 1` set means `x_v` true),
/// counted from the literals with no polynomial machinery.
pub fn falsified(phi: &CnfFormula, assignment: u64) -> i64 {
    phi.clauses()
        .iter()
        .filter(|c| {
            c.literals().iter().all(|lit| {
                let value = assignment >> (lit.var - 1) & 1 == 1;
                value == lit.negated
            })
        })
        .count() as i64
}

/// Whether `(mode, L)` holds at every assignment, by enumeration.
pub fn claim_holds(phi: &CnfFormula, mode: Mode, l: i64) -> bool {
    (0..1u64 << phi.n()).all(|x| {
        let k = falsified(phi, x);
        match mode {
            Mode::Maxsat | Mode::Unsat => k >= l,
            Mode::Minsat => k <= l,
            Mode::Sat => -k >= l,
        }
    })
}
