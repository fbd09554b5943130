//! Splitting solver for the Gram programs.
//!
//! Unknowns are `x = (svec U, svec V0)` with `V = V0 + floor * I`, and the
//! residual is `L x - b`. ADMM runs on
//!
//! ```text
//! min ||z||_1  s.t.  L x - b = z,  x = Y,  Y in PSD x PSD
//! ```
//!
//! The `x`-step solves `(I + L^T L) x = rhs` with a factorization computed
//! once; the step size only enters the shrinkage and the duals, so it can
//! adapt for free.

use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{check_solution, GramProblem, GramSolution, ProblemKind};
use crate::error::Result;

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub max_iters: u64,
    /// Feasibility stops once the residual is below `1/2 - safety`.
    pub safety: f64,
    pub check_every: u64,
    pub rho: f64,
    /// Stopping tolerance on primal and dual residuals (minimization).
    pub eps: f64,
    pub deadline: Option<Instant>,
    /// Minimization also stops early once the residual falls below this.
    pub stop_below: Option<f64>,
    /// Largest dense system factored directly; above it conjugate gradients run.
    pub dense_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 20_000,
            safety: 0.01,
            check_every: 10,
            rho: 1.0,
            eps: 1e-9,
            deadline: None,
            stop_below: None,
            dense_limit: 3000,
        }
    }
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Solved {
        solution: GramSolution,
        /// Scaled dual of the residual constraint; lies in `[-1, 1]` near optimum.
        dual: Vec<f64>,
    },
    NotFound {
        best_residual: f64,
        iterations: u64,
        reason: String,
    },
}

/// Sparse `L` by columns, plus the offset `b`.
struct Operator {
    s: usize,
    t: usize,
    rows: usize,
    cols: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
}

fn svec_len(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Upper-triangle pairs in svec order.
fn pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |a| (a..k).map(move |b| (a, b)))
}

impl Operator {
    fn new(prob: &GramProblem) -> Operator {
        let s = prob.s.len();
        let has_v = prob.kind == ProblemKind::FeasibilityRational;
        let t = if has_v { prob.t.len() } else { 0 };
        let mut cols = Vec::with_capacity(svec_len(s) + svec_len(t));
        for (a, b) in pairs(s) {
            let lam = prob.index[&prob.s[a].xor(&prob.s[b])];
            cols.push(vec![(lam, if a == b { 1.0 } else { SQRT2 })]);
        }
        for (a, b) in pairs(t) {
            let ab = prob.t[a].xor(&prob.t[b]);
            let w = if a == b { 1.0 } else { SQRT2 };
            let mut col: Vec<(usize, f64)> = prob
                .f
                .terms()
                .map(|(g, c)| (prob.index[&ab.xor(g)], -c * w))
                .collect();
            col.sort_by_key(|e| e.0);
            cols.push(col);
        }
        // b = floor * B(I) = floor * |T| * f on Lambda
        let mut b = vec![0.0; prob.lambda.len()];
        let scale = prob.v_floor * prob.t.len() as f64;
        for (g, c) in prob.f.terms() {
            b[prob.index[g]] = scale * c;
        }
        Operator {
            s,
            t,
            rows: prob.lambda.len(),
            cols,
            b,
        }
    }

    fn dim(&self) -> usize {
        self.cols.len()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        for (col, &xi) in self.cols.iter().zip(x) {
            if xi != 0.0 {
                for &(r, c) in col {
                    y[r] += c * xi;
                }
            }
        }
        y
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.cols
            .iter()
            .map(|col| col.iter().map(|&(r, c)| c * y[r]).sum())
            .collect()
    }
}

enum LinearSolver {
    /// `(I + L L^T)` factored; Woodbury gives the inverse of `I + L^T L`.
    Woodbury(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Direct(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Cg,
}

impl LinearSolver {
    fn new(op: &Operator, dense_limit: usize) -> LinearSolver {
        let (rows, dim) = (op.rows, op.dim());
        if rows <= dim && rows <= dense_limit {
            let mut k = DMatrix::<f64>::identity(rows, rows);
            for col in &op.cols {
                for &(i, ci) in col {
                    for &(j, cj) in col {
                        k[(i, j)] += ci * cj;
                    }
                }
            }
            if let Some(ch) = k.cholesky() {
                return LinearSolver::Woodbury(ch);
            }
        } else if dim <= dense_limit {
            let mut k = DMatrix::<f64>::identity(dim, dim);
            // (L^T L)_pq = sum_r L_rp L_rq, via row lists
            let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
            for (p, col) in op.cols.iter().enumerate() {
                for &(r, c) in col {
                    by_row[r].push((p, c));
                }
            }
            for row in &by_row {
                for &(p, cp) in row {
                    for &(q, cq) in row {
                        k[(p, q)] += cp * cq;
                    }
                }
            }
            if let Some(ch) = k.cholesky() {
                return LinearSolver::Direct(ch);
            }
        }
        LinearSolver::Cg
    }

    fn solve(&self, op: &Operator, rhs: &[f64], warm: &[f64]) -> Vec<f64> {
        match self {
            LinearSolver::Woodbury(ch) => {
                let lr = DVector::from_vec(op.apply(rhs));
                let w = ch.solve(&lr);
                let back = op.adjoint(w.as_slice());
                rhs.iter().zip(back).map(|(a, b)| a - b).collect()
            }
            LinearSolver::Direct(ch) => ch.solve(&DVector::from_column_slice(rhs)).as_slice().to_vec(),
            LinearSolver::Cg => conjugate_gradient(op, rhs, warm),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normal_apply(op: &Operator, x: &[f64]) -> Vec<f64> {
    let ltl = op.adjoint(&op.apply(x));
    x.iter().zip(ltl).map(|(a, b)| a + b).collect()
}

fn conjugate_gradient(op: &Operator, rhs: &[f64], warm: &[f64]) -> Vec<f64> {
    let mut x = warm.to_vec();
    let ax = normal_apply(op, &x);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(a, b)| a - b).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let stop = 1e-24 * dot(rhs, rhs).max(1e-300);
    for _ in 0..1000 {
        if rr <= stop {
            break;
        }
        let ap = normal_apply(op, &p);
        let alpha = rr / dot(&p, &ap);
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..p.len() {
            p[i] = r[i] + beta * p[i];
        }
    }
    x
}

fn unpack(v: &[f64], k: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(k, k);
    for ((a, b), &x) in pairs(k).zip(v) {
        if a == b {
            m[(a, a)] = x;
        } else {
            m[(a, b)] = x / SQRT2;
            m[(b, a)] = x / SQRT2;
        }
    }
    m
}

fn pack(m: &DMatrix<f64>, out: &mut [f64]) {
    let k = m.nrows();
    for ((a, b), o) in pairs(k).zip(out.iter_mut()) {
        *o = if a == b { m[(a, a)] } else { m[(a, b)] * SQRT2 };
    }
}

fn project_psd_block(v: &mut [f64], k: usize) {
    if k == 0 {
        return;
    }
    if k == 1 {
        v[0] = v[0].max(0.0);
        return;
    }
    let eig = SymmetricEigen::new(unpack(v, k));
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return;
    }
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let m = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    pack(&m, v);
}

fn project(op: &Operator, x: &mut [f64]) {
    let su = svec_len(op.s);
    let (u, v) = x.split_at_mut(su);
    project_psd_block(u, op.s);
    project_psd_block(v, op.t);
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Runs ADMM on the assembled program.
///
/// Feasibility returns the first iterate whose residual clears `1/2 - safety`;
/// minimization returns the best iterate seen. Every result is re-checked by
/// [`check_solution`].
pub fn solve(prob: &GramProblem, cfg: &SolverConfig) -> Result<SolveOutcome> {
    let op = Operator::new(prob);
    let lin = LinearSolver::new(&op, cfg.dense_limit);
    let dim = op.dim();
    let su = svec_len(op.s);
    let target = 0.5 - cfg.safety;
    let feasibility = prob.kind == ProblemKind::FeasibilityRational;

    // warm start: diagonal U matching the constant term, V0 = 0
    let f0 = prob.f.constant_term();
    let mut y = vec![0.0; dim];
    let diag = (prob.v_floor * prob.t.len() as f64 * f0 / op.s as f64).max(0.0);
    for (i, (a, b)) in pairs(op.s).enumerate() {
        if a == b {
            y[i] = diag;
        }
    }
    let mut x = y.clone();
    let mut z: Vec<f64> = op.apply(&x).iter().zip(&op.b).map(|(a, b)| a - b).collect();
    let mut u = vec![0.0; op.rows];
    let mut v = vec![0.0; dim];
    let mut rho = cfg.rho;
    let alpha = 1.6;

    let residual_at = |y: &[f64]| -> f64 {
        op.apply(y).iter().zip(&op.b).map(|(a, b)| (a - b).abs()).sum()
    };
    let mut best = (residual_at(&y), y.clone());
    let mut iters = 0u64;
    let mut reason = "iteration cap reached".to_string();

    while iters < cfg.max_iters {
        iters += 1;
        let zb: Vec<f64> = z.iter().zip(&op.b).zip(&u).map(|((z, b), u)| z + b - u).collect();
        let mut rhs = op.adjoint(&zb);
        for i in 0..dim {
            rhs[i] += y[i] - v[i];
        }
        x = lin.solve(&op, &rhs, &x);
        let lx = op.apply(&x);
        // over-relaxed images
        let lx_hat: Vec<f64> = lx
            .iter()
            .zip(&z)
            .zip(&op.b)
            .map(|((l, z), b)| alpha * l + (1.0 - alpha) * (z + b))
            .collect();
        let x_hat: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();

        let z_old = std::mem::take(&mut z);
        let kappa = 1.0 / rho;
        z = lx_hat
            .iter()
            .zip(&op.b)
            .zip(&u)
            .map(|((l, b), u)| {
                let w = l - b + u;
                w.signum() * (w.abs() - kappa).max(0.0)
            })
            .collect();
        let y_old = y.clone();
        for i in 0..dim {
            y[i] = x_hat[i] + v[i];
        }
        project(&op, &mut y);
        for r in 0..op.rows {
            u[r] += lx_hat[r] - op.b[r] - z[r];
        }
        for i in 0..dim {
            v[i] += x_hat[i] - y[i];
        }

        if x.iter().chain(&u).any(|a| !a.is_finite()) {
            reason = "numerical breakdown".into();
            break;
        }

        if iters % cfg.check_every == 0 {
            let r = residual_at(&y);
            if r < best.0 {
                best = (r, y.clone());
            }
            if feasibility && best.0 < target {
                break;
            }
            if !feasibility && cfg.stop_below.is_some_and(|t| best.0 < t) {
                reason = "below requested residual".into();
                break;
            }
            let prim = norm(
                &lx.iter()
                    .zip(&op.b)
                    .zip(&z)
                    .map(|((l, b), z)| l - b - z)
                    .chain(x.iter().zip(&y).map(|(a, b)| a - b))
                    .collect::<Vec<_>>(),
            );
            let dz: Vec<f64> = z.iter().zip(&z_old).map(|(a, b)| a - b).collect();
            let mut dual = op.adjoint(&dz);
            for i in 0..dim {
                dual[i] += y[i] - y_old[i];
            }
            let dres = rho * norm(&dual);
            let scale = (dim + op.rows) as f64;
            if !feasibility && prim < cfg.eps * scale.sqrt() && dres < cfg.eps * scale.sqrt() {
                reason = "converged".into();
                break;
            }
            if iters % (5 * cfg.check_every) == 0 {
                if prim > 10.0 * dres {
                    rho *= 2.0;
                    u.iter_mut().chain(v.iter_mut()).for_each(|a| *a /= 2.0);
                } else if dres > 10.0 * prim {
                    rho /= 2.0;
                    u.iter_mut().chain(v.iter_mut()).for_each(|a| *a *= 2.0);
                }
            }
            if cfg.deadline.is_some_and(|d| Instant::now() >= d) {
                reason = "time budget exhausted".into();
                break;
            }
        }
    }
    let r = residual_at(&y);
    if r < best.0 {
        best = (r, y.clone());
    }
    log::debug!("admm: {iters} iterations, best residual {:.3e} ({reason})", best.0);

    let (best_res, yb) = best;
    let umat = unpack(&yb[..su], op.s);
    let vmat = if feasibility {
        unpack(&yb[su..], op.t) + DMatrix::identity(op.t, op.t) * prob.v_floor
    } else {
        DMatrix::from_element(1, 1, 1.0)
    };
    let solution = check_solution(prob, umat, vmat, iters)?;
    if feasibility && !(solution.l1_residual < target) {
        return Ok(SolveOutcome::NotFound {
            best_residual: best_res,
            iterations: iters,
            reason,
        });
    }
    let dual = u.iter().map(|a| a * rho).collect();
    Ok(SolveOutcome::Solved { solution, dual })
}
