//! Gram-matrix programs for FSOS certificates.
//!
//! With numerator support `S` and denominator support `T`, a pair of PSD
//! matrices `(U, V)` gives `sum g^2 = w_S^T U w_S` and `sum h^2 = w_T^T V w_T`
//! where `w_S(y) = (y^alpha)_{alpha in S}`. The residual
//! `f * sum h^2 - sum g^2` has coefficient
//!
//! ```text
//! r_lambda = sum_{a xor b = lambda} U_ab - sum_{gamma xor nu xor zeta = lambda} f_gamma V_nu,zeta
//! ```
//!
//! on `Lambda = (S xor S) u (T xor T xor supp f)`. Everything here is `f64`;
//! the exact validators restore rigour downstream.

mod admm;
mod dual;
mod sdpa;

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{FsosError, Result};
use crate::fourier::{word_count, FloatPoly, Monomial};

pub use admm::{solve, SolveOutcome, SolverConfig};
pub use dual::{min_l1_dual_bound, DualBound};
pub use sdpa::{export_sdpa, import_sdpa_solution};

/// Margin added to the `V >= I/|T|` constraint while solving.
pub const DEFAULT_PSD_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    /// `||r||_1 < 1/2` with `U >= 0`, `V >= (1/|T| + mu) I`.
    FeasibilityRational,
    /// `min ||r||_1` over `U >= 0` with `T = {0}` and `V = [1]`.
    MinL1Poly,
}

/// An assembled Gram program.
#[derive(Clone, Debug)]
pub struct GramProblem {
    pub(crate) n: usize,
    pub(crate) f: FloatPoly,
    pub(crate) s: Vec<Monomial>,
    pub(crate) t: Vec<Monomial>,
    pub(crate) lambda: Vec<Monomial>,
    pub(crate) index: HashMap<Monomial, usize>,
    pub(crate) kind: ProblemKind,
    /// Lower bound on `V`'s spectrum, `1/|T| + mu` (exactly 1 when pinned).
    pub(crate) v_floor: f64,
}

impl GramProblem {
    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> &[Monomial] {
        &self.s
    }

    pub fn t(&self) -> &[Monomial] {
        &self.t
    }

    pub fn lambda(&self) -> &[Monomial] {
        &self.lambda
    }

    pub fn f(&self) -> &FloatPoly {
        &self.f
    }

    pub fn v_floor(&self) -> f64 {
        self.v_floor
    }
}

fn dedup_sorted(mut v: Vec<Monomial>) -> Vec<Monomial> {
    v.sort();
    v.dedup();
    v
}

/// Builds the program for `(f, S, T)`.
///
/// For [`ProblemKind::MinL1Poly`] `T` must be `{0}`; `V` is pinned to `[1]`.
pub fn assemble(
    f: &FloatPoly,
    s: &[Monomial],
    t: &[Monomial],
    kind: ProblemKind,
    psd_margin: f64,
) -> Result<GramProblem> {
    if s.is_empty() || t.is_empty() {
        return Err(FsosError::InvalidArgument("S and T must be nonempty".into()));
    }
    let n = f.n();
    for m in s.iter().chain(t) {
        if m.words().len() != word_count(n) || m.vars().any(|v| v > n) {
            return Err(FsosError::InvalidArgument(format!("monomial {m} is not on {n} variables")));
        }
    }
    let s = dedup_sorted(s.to_vec());
    let t = dedup_sorted(t.to_vec());
    if kind == ProblemKind::MinL1Poly && (t.len() != 1 || !t[0].is_one()) {
        return Err(FsosError::InvalidArgument(
            "the polynomial program takes T = {0}".into(),
        ));
    }
    let mut set = BTreeSet::new();
    for (i, a) in s.iter().enumerate() {
        for b in &s[i..] {
            set.insert(a.xor(b));
        }
    }
    for (i, a) in t.iter().enumerate() {
        for b in &t[i..] {
            let ab = a.xor(b);
            for g in f.support() {
                set.insert(ab.xor(g));
            }
        }
    }
    let lambda: Vec<Monomial> = set.into_iter().collect();
    let index = lambda.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let v_floor = match kind {
        ProblemKind::MinL1Poly => 1.0,
        ProblemKind::FeasibilityRational => 1.0 / t.len() as f64 + psd_margin,
    };
    log::debug!("assembled |S| = {}, |T| = {}, |Lambda| = {}", s.len(), t.len(), lambda.len());
    Ok(GramProblem {
        n,
        f: f.clone(),
        s,
        t,
        lambda,
        index,
        kind,
        v_floor,
    })
}

/// A solver result, re-checked independently of the solver.
#[derive(Clone, Debug)]
pub struct GramSolution {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub l1_residual: f64,
    /// `(lambda_min(U), lambda_min(V))`.
    pub psd_margins: (f64, f64),
    pub iterations: u64,
}

/// `sum_lambda |sum_{a xor b = lambda} U_ab - sum f_gamma V_nu,zeta|`, computed
/// straight from the matrices.
pub fn l1_residual(prob: &GramProblem, u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    let mut r: HashMap<Monomial, f64> = HashMap::new();
    for (a, ma) in prob.s.iter().enumerate() {
        for (b, mb) in prob.s.iter().enumerate() {
            *r.entry(ma.xor(mb)).or_default() += u[(a, b)];
        }
    }
    for (a, ma) in prob.t.iter().enumerate() {
        for (b, mb) in prob.t.iter().enumerate() {
            let ab = ma.xor(mb);
            for (g, c) in prob.f.terms() {
                *r.entry(ab.xor(g)).or_default() -= c * v[(a, b)];
            }
        }
    }
    r.values().map(|x| x.abs()).sum()
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Packages `(U, V)` after re-checking residual and cones.
pub fn check_solution(
    prob: &GramProblem,
    u: DMatrix<f64>,
    v: DMatrix<f64>,
    iterations: u64,
) -> Result<GramSolution> {
    let (s, t) = (prob.s.len(), prob.t.len());
    if u.shape() != (s, s) || v.shape() != (t, t) {
        return Err(FsosError::InvalidArgument(format!(
            "expected U {s}x{s} and V {t}x{t}, got {:?} and {:?}",
            u.shape(),
            v.shape()
        )));
    }
    if u.iter().chain(v.iter()).any(|x| !x.is_finite()) {
        return Err(FsosError::InvalidArgument("non-finite matrix entry".into()));
    }
    let u = (&u + u.transpose()) * 0.5;
    let v = (&v + v.transpose()) * 0.5;
    let l1 = l1_residual(prob, &u, &v);
    let margins = (min_eigenvalue(&u), min_eigenvalue(&v));
    Ok(GramSolution {
        u,
        v,
        l1_residual: l1,
        psd_margins: margins,
        iterations,
    })
}

/// Rows of a factor `G` with `G^T G = M` (negative eigenvalues clipped), as
/// polynomials `sum_beta G_row,beta z^beta`.
pub fn psd_extract(
    n: usize,
    m: &DMatrix<f64>,
    labels: &[Monomial],
    tol: f64,
) -> Result<Vec<FloatPoly>> {
    if m.nrows() != labels.len() || m.ncols() != labels.len() {
        return Err(FsosError::InvalidArgument("matrix and labels disagree in size".into()));
    }
    if labels.is_empty() {
        return Ok(Vec::new());
    }
    let eig = SymmetricEigen::new((m + m.transpose()) * 0.5);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(FsosError::NotPsd { min_eigenvalue: min });
    }
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues.iter().cloned().fold(1.0f64, f64::max);
    let mut out = Vec::new();
    for k in order {
        if eig.eigenvalues[k] <= 1e-14 * top {
            continue;
        }
        let scale = eig.eigenvalues[k].sqrt();
        let q = eig.eigenvectors.column(k);
        // fix the sign so the largest component is positive
        let pivot = q.iter().cloned().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        let row: Vec<f64> = q.iter().map(|x| x * scale * sign).collect();
        out.push(FloatPoly::from_terms(n, labels.iter().cloned().zip(row))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
