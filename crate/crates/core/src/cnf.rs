//! CNF formulae, DIMACS input, the Boolean-to-sign map and the brute-force oracle.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{FsosError, Result};

/// Default cap on `n` for the `2^n` enumeration in [`oracle_bounds`].
pub const DEFAULT_ORACLE_LIMIT: usize = 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    /// 1-based variable index.
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn from_dimacs(lit: i64) -> Literal {
        Literal {
            var: lit.unsigned_abs() as usize,
            negated: lit < 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    /// Whether this literal is true under `x`.
    pub fn holds(self, x: &Assignment) -> bool {
        x.0[self.var - 1] != self.negated
    }
}

/// A canonical clause: nonempty, no repeated variable, literals sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    pub fn is_falsified(&self, x: &Assignment) -> bool {
        self.literals.iter().all(|l| !l.holds(x))
    }
}

/// Outcome of canonicalizing one raw clause.
enum Canon {
    Clause(Clause),
    Tautology,
}

fn canonicalize(raw: &[i64]) -> Canon {
    let mut lits: Vec<Literal> = raw.iter().map(|&l| Literal::from_dimacs(l)).collect();
    lits.sort();
    lits.dedup();
    if lits.windows(2).any(|w| w[0].var == w[1].var) {
        return Canon::Tautology;
    }
    Canon::Clause(Clause { literals: lits })
}

/// Truth assignment; entry `i` is the value of variable `i + 1`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    /// Decodes bit `i` of `bits` as variable `i + 1` (`1` = True).
    pub fn from_bits(n: usize, bits: u64) -> Assignment {
        Assignment((0..n).map(|i| bits >> i & 1 == 1).collect())
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// DIMACS-style literal list, e.g. `1 -2 3`.
impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &v) in self.0.iter().enumerate() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if v {
                write!(f, "{}", i + 1)?;
            } else {
                write!(f, "-{}", i + 1)?;
            }
        }
        Ok(())
    }
}

/// The map `False -> +1`, `True -> -1`.
pub fn tau(x: &Assignment) -> Vec<i64> {
    x.0.iter().map(|&b| if b { -1 } else { 1 }).collect()
}

/// Inverse of [`tau`]. Entries other than `-1` read as False.
pub fn tau_inv(y: &[i64]) -> Assignment {
    Assignment(y.iter().map(|&v| v == -1).collect())
}

/// A CNF formula. Repeated clauses are kept and act as weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    /// Builds a formula from DIMACS-style literal lists, canonicalizing each clause.
    ///
    /// Tautologies are dropped with a warning.
    pub fn new<C: AsRef<[i64]>>(n: usize, clauses: &[C]) -> Result<CnfFormula> {
        if n > crate::fourier::MAX_VARS {
            return Err(FsosError::TooManyVariables(n));
        }
        let mut out = Vec::with_capacity(clauses.len());
        for (i, raw) in clauses.iter().enumerate() {
            let raw = raw.as_ref();
            check_clause(n, raw).map_err(|message| FsosError::InvalidArgument(format!(
                "clause {}: {message}",
                i + 1
            )))?;
            match canonicalize(raw) {
                Canon::Clause(c) => out.push(c),
                Canon::Tautology => log::warn!("clause {} is a tautology; dropped", i + 1),
            }
        }
        Ok(CnfFormula { n, clauses: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of clauses, repetitions included.
    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Largest clause width `k` (0 for the empty formula).
    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(Clause::width).max().unwrap_or(0)
    }

    pub fn falsified_count(&self, x: &Assignment) -> usize {
        self.clauses.iter().filter(|c| c.is_falsified(x)).count()
    }

    /// Canonical DIMACS text: header, then each clause with literals
    /// sorted by variable, in stored order, LF line endings.
    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.n, self.m());
        for c in &self.clauses {
            for l in &c.literals {
                s.push_str(&l.to_dimacs().to_string());
                s.push(' ');
            }
            s.push_str("0\n");
        }
        s
    }

    /// Hex SHA-256 of [`to_dimacs`](Self::to_dimacs).
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_dimacs().as_bytes()))
    }
}

fn check_clause(n: usize, raw: &[i64]) -> std::result::Result<(), String> {
    if raw.is_empty() {
        return Err("empty clause".into());
    }
    for &l in raw {
        if l == 0 || l.unsigned_abs() as usize > n {
            return Err(format!("literal {l} outside 1..={n}"));
        }
    }
    Ok(())
}

fn dimacs_err(line: usize, message: impl Into<String>) -> FsosError {
    FsosError::Dimacs {
        line,
        message: message.into(),
    }
}

/// Parses DIMACS CNF text.
///
/// Clauses may span lines. Repeated literals are merged; tautological
/// clauses are dropped (with a warning) and do not count towards `m`.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut current_start = 0;
    let mut last_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if t.starts_with('%') {
            break;
        }
        if t.starts_with('p') {
            if header.is_some() {
                return Err(dimacs_err(lineno, "duplicate header"));
            }
            let parts: Vec<&str> = t.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(dimacs_err(lineno, format!("malformed header {t:?}")));
            }
            let n = parts[2]
                .parse::<usize>()
                .map_err(|_| dimacs_err(lineno, format!("bad variable count {:?}", parts[2])))?;
            let m = parts[3]
                .parse::<usize>()
                .map_err(|_| dimacs_err(lineno, format!("bad clause count {:?}", parts[3])))?;
            if n > crate::fourier::MAX_VARS {
                return Err(FsosError::TooManyVariables(n));
            }
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(dimacs_err(lineno, "clause before the 'p cnf' header"));
        };
        for tok in t.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| dimacs_err(lineno, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(dimacs_err(lineno, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if lit.unsigned_abs() as usize > n {
                return Err(dimacs_err(
                    lineno,
                    format!("literal {lit} out of range for n = {n}"),
                ));
            }
            if current.is_empty() {
                current_start = lineno;
            }
            current.push(lit);
        }
    }
    let Some((n, declared_m)) = header else {
        return Err(dimacs_err(last_line.max(1), "missing 'p cnf' header"));
    };
    if !current.is_empty() {
        return Err(dimacs_err(current_start, "clause not terminated by 0"));
    }
    if clauses.len() != declared_m {
        log::warn!(
            "header declares {declared_m} clauses, found {}",
            clauses.len()
        );
    }
    CnfFormula::new(n, &clauses)
}

/// Exact extremes of the falsified-clause count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleBounds {
    pub l_min: usize,
    pub l_max: usize,
    pub witness_min: Assignment,
    pub witness_max: Assignment,
}

/// Enumerates all `2^n` assignments (Gray-code order, parallel over high bits).
pub fn oracle_bounds(phi: &CnfFormula, limit: usize) -> Result<OracleBounds> {
    let n = phi.n();
    if n > limit || n > 62 {
        return Err(FsosError::AboveExhaustiveLimit { n, limit });
    }
    let high = n.saturating_sub(12).min(10);
    let low = n - high;

    // per-variable occurrence lists: (clause index, negated)
    let mut occ: Vec<Vec<(u32, bool)>> = vec![Vec::new(); n];
    for (ci, c) in phi.clauses().iter().enumerate() {
        for l in c.literals() {
            occ[l.var - 1].push((ci as u32, l.negated));
        }
    }

    let per_chunk: Vec<ChunkResult> = (0..1u64 << high)
        .into_par_iter()
        .map(|h| scan_chunk(phi, &occ, low, h))
        .collect();

    let mut it = per_chunk.into_iter();
    let mut best = it.next().expect("at least one chunk");
    for c in it {
        if c.min.0 < best.min.0 {
            best.min = c.min;
        }
        if c.max.0 > best.max.0 {
            best.max = c.max;
        }
    }
    Ok(OracleBounds {
        l_min: best.min.0,
        l_max: best.max.0,
        witness_min: Assignment::from_bits(n, best.min.1),
        witness_max: Assignment::from_bits(n, best.max.1),
    })
}

struct ChunkResult {
    min: (usize, u64),
    max: (usize, u64),
}

fn scan_chunk(phi: &CnfFormula, occ: &[Vec<(u32, bool)>], low: usize, high_bits: u64) -> ChunkResult {
    let base = high_bits << low;
    let x = Assignment::from_bits(phi.n(), base);
    let mut sat: Vec<u32> = phi
        .clauses()
        .iter()
        .map(|c| c.literals().iter().filter(|l| l.holds(&x)).count() as u32)
        .collect();
    let mut falsified = sat.iter().filter(|&&s| s == 0).count();
    let mut bits = base;
    let mut min = (falsified, bits);
    let mut max = (falsified, bits);
    for step in 1..(1u64 << low) {
        let v = step.trailing_zeros() as usize;
        bits ^= 1 << v;
        let now_true = bits >> v & 1 == 1;
        for &(ci, negated) in &occ[v] {
            let s = &mut sat[ci as usize];
            if now_true != negated {
                if *s == 0 {
                    falsified -= 1;
                }
                *s += 1;
            } else {
                *s -= 1;
                if *s == 0 {
                    falsified += 1;
                }
            }
        }
        if falsified < min.0 {
            min = (falsified, bits);
        }
        if falsified > max.0 {
            max = (falsified, bits);
        }
    }
    ChunkResult { min, max }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX32: &str = "p cnf 3 4\n1 0\n2 0\n3 0\n-1 -2 -3 0\n";

    #[test]
    fn parses_example_formula() {
        let phi = parse_dimacs(EX32).unwrap();
        assert_eq!((phi.n(), phi.m()), (3, 4));
        assert_eq!(phi.max_width(), 3);
    }

    #[test]
    fn tautology_is_dropped() {
        let phi = parse_dimacs("p cnf 1 1\n1 -1 0\n").unwrap();
        assert_eq!(phi.m(), 0);
    }

    #[test]
    fn duplicate_literals_merge() {
        let phi = parse_dimacs("p cnf 2 2\n1 1 0\n1 0\n").unwrap();
        assert_eq!(phi.m(), 2);
        assert_eq!(phi.clauses()[0], phi.clauses()[1]);
    }

    #[test]
    fn clauses_may_span_lines() {
        let phi = parse_dimacs("c hi\np cnf 3 1\n1 -2\n 3 0\n").unwrap();
        assert_eq!(phi.clauses()[0].width(), 3);
    }

    #[test]
    fn parse_errors() {
        let cases = [
            ("p cnf x 1\n1 0\n", 1),
            ("p cnf 2 1\n3 0\n", 2),
            ("p cnf 2 1\n1 2\n", 2),
            ("p cnf 2 1\n0\n", 2),
            ("1 0\n", 1),
        ];
        for (text, line) in cases {
            match parse_dimacs(text) {
                Err(FsosError::Dimacs { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&Assignment(vec![false; 3])), vec![1, 1, 1]);
        assert_eq!(tau(&Assignment(vec![true; 3])), vec![-1, -1, -1]);
        assert_eq!(tau(&Assignment(vec![true, false, true])), vec![-1, 1, -1]);
        let x = Assignment(vec![true, false, false, true]);
        assert_eq!(tau_inv(&tau(&x)), x);
    }

    #[test]
    fn oracle_on_examples() {
        let phi = parse_dimacs(EX32).unwrap();
        let b = oracle_bounds(&phi, 26).unwrap();
        assert_eq!(b.l_min, 1);
        assert_eq!(phi.falsified_count(&b.witness_min), 1);

        let units = CnfFormula::new(4, &[[1], [2], [3], [4]]).unwrap();
        let b = oracle_bounds(&units, 26).unwrap();
        assert_eq!(b.l_min, 0);
        assert_eq!(b.witness_min, Assignment(vec![true; 4]));
        assert_eq!(b.l_max, 4);
    }

    #[test]
    fn oracle_matches_naive_count_with_chunks() {
        // n = 14 exercises the high-bit split
        let mut clauses = Vec::new();
        let mut s = 7u64;
        for _ in 0..40 {
            let mut c = Vec::new();
            for _ in 0..3 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let v = (s >> 33) % 14 + 1;
                c.push(if s >> 20 & 1 == 1 { v as i64 } else { -(v as i64) });
            }
            clauses.push(c);
        }
        let phi = CnfFormula::new(14, &clauses).unwrap();
        let b = oracle_bounds(&phi, 26).unwrap();
        let counts: Vec<usize> = (0..1u64 << 14)
            .map(|bits| phi.falsified_count(&Assignment::from_bits(14, bits)))
            .collect();
        assert_eq!(b.l_min, *counts.iter().min().unwrap());
        assert_eq!(b.l_max, *counts.iter().max().unwrap());
        assert_eq!(phi.falsified_count(&b.witness_max), b.l_max);
    }

    #[test]
    fn oracle_limit() {
        let phi = CnfFormula::new(5, &[[1]]).unwrap();
        assert!(matches!(
            oracle_bounds(&phi, 4),
            Err(FsosError::AboveExhaustiveLimit { n: 5, limit: 4 })
        ));
    }

    #[test]
    fn digest_ignores_literal_order() {
        let a = parse_dimacs("p cnf 2 1\n2 -1 0\n").unwrap();
        let b = parse_dimacs("p cnf 2 1\n-1 2 0\n").unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.to_dimacs(), "p cnf 2 1\n-1 2 0\n");
    }
}
