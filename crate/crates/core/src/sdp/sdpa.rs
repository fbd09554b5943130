//! SDPA sparse format (`.dat-s`) for the Gram programs.
//!
//! The program is written in SDPA's dual standard form
//! `max F0 . Y  s.t.  F_i . Y = c_i,  Y >= 0` with three blocks:
//!
//! 1. `U` (`|S| x |S|`),
//! 2. `V0 = V - floor * I` (`|T| x |T|`),
//! 3. a diagonal block `(p, q)` of `2 |Lambda|` slacks with `r = p - q`.
//!
//! Constraint `lambda` reads `A(U) - B(V0) - p + q = floor * |T| * f_lambda`,
//! and the objective maximizes `-sum (p + q)`, i.e. minimizes the l1 residual.
//! The polynomial program appends one constraint pinning `V0 = 0`.
//!
//! Solutions come back as entry lines `block i j value` for `Y`, optionally
//! prefixed by a matrix number that is ignored.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::{check_solution, GramProblem, GramSolution, ProblemKind};
use crate::error::{FsosError, Result};

/// Renders the program; floats use the shortest round-trip representation.
pub fn export_sdpa(prob: &GramProblem) -> String {
    let (s, t, nl) = (prob.s.len(), prob.t.len(), prob.lambda.len());
    let pinned = prob.kind == ProblemKind::MinL1Poly;
    let m = nl + usize::from(pinned);
    let mut out = String::new();
    let kind = match prob.kind {
        ProblemKind::FeasibilityRational => "feasibility-rational",
        ProblemKind::MinL1Poly => "min-l1-poly",
    };
    let _ = writeln!(out, "\"fsos gram program {kind}: |S| = {s}, |T| = {t}, |Lambda| = {nl}, floor = {}", prob.v_floor);
    for (i, a) in prob.s.iter().enumerate() {
        let _ = writeln!(out, "* S {} {a}", i + 1);
    }
    for (i, a) in prob.t.iter().enumerate() {
        let _ = writeln!(out, "* T {} {a}", i + 1);
    }
    let _ = writeln!(out, "{m} = mDIM");
    let _ = writeln!(out, "3 = nBLOCK");
    let _ = writeln!(out, "{s} {t} -{}", 2 * nl);
    let scale = prob.v_floor * t as f64;
    let mut c = vec![0.0; m];
    for (g, v) in prob.f.terms() {
        c[prob.index[g]] = scale * v;
    }
    let cs: Vec<String> = c.iter().map(|v| format!("{v}")).collect();
    let _ = writeln!(out, "{}", cs.join(" "));
    for k in 0..2 * nl {
        let _ = writeln!(out, "0 3 {} {} -1", k + 1, k + 1);
    }
    // entries grouped by constraint
    let mut rows: Vec<Vec<(u8, usize, usize, f64)>> = vec![Vec::new(); m];
    for a in 0..s {
        for b in a..s {
            rows[prob.index[&prob.s[a].xor(&prob.s[b])]].push((1, a + 1, b + 1, 1.0));
        }
    }
    for a in 0..t {
        for b in a..t {
            let ab = prob.t[a].xor(&prob.t[b]);
            for (g, v) in prob.f.terms() {
                rows[prob.index[&ab.xor(g)]].push((2, a + 1, b + 1, -v));
            }
        }
    }
    for (k, row) in rows.iter_mut().enumerate().take(nl) {
        row.push((3, k + 1, k + 1, -1.0));
        row.push((3, nl + k + 1, nl + k + 1, 1.0));
    }
    if pinned {
        rows[nl].push((2, 1, 1, 1.0));
    }
    for (k, row) in rows.iter().enumerate() {
        for &(blk, i, j, v) in row {
            let _ = writeln!(out, "{} {blk} {i} {j} {v}", k + 1);
        }
    }
    out
}

/// Reads `Y` entries and re-checks the implied `(U, V)`.
pub fn import_sdpa_solution(prob: &GramProblem, text: &str) -> Result<GramSolution> {
    let (s, t) = (prob.s.len(), prob.t.len());
    let mut u = DMatrix::zeros(s, s);
    let mut v0 = DMatrix::zeros(t, t);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with(['"', '*', '#']) {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}')
            .filter(|f| !f.is_empty())
            .collect();
        let fields = match fields.len() {
            4 => &fields[..],
            5 => &fields[1..],
            _ => {
                return Err(FsosError::Sdpa(format!(
                    "line {}: expected `block i j value`",
                    lineno + 1
                )))
            }
        };
        let bad = |what: &str| FsosError::Sdpa(format!("line {}: bad {what}", lineno + 1));
        let blk: usize = fields[0].parse().map_err(|_| bad("block"))?;
        let i: usize = fields[1].parse().map_err(|_| bad("row"))?;
        let j: usize = fields[2].parse().map_err(|_| bad("column"))?;
        let val: f64 = fields[3].parse().map_err(|_| bad("value"))?;
        let target = match blk {
            1 => &mut u,
            2 => &mut v0,
            3 => continue,
            _ => return Err(bad("block number")),
        };
        let k = target.nrows();
        if i == 0 || j == 0 || i > k || j > k {
            return Err(bad("index"));
        }
        target[(i - 1, j - 1)] = val;
        target[(j - 1, i - 1)] = val;
    }
    let v = match prob.kind {
        ProblemKind::FeasibilityRational => v0 + DMatrix::identity(t, t) * prob.v_floor,
        ProblemKind::MinL1Poly => DMatrix::from_element(1, 1, 1.0),
    };
    check_solution(prob, u, v, 0)
}
