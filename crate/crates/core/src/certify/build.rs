//! The certificate builder: approximate `sqrt(f)` by a univariate polynomial,
//! read supports off its truncated composition, solve the Gram program and
//! round the factors to decimals.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{
    compose, default_rho_schedule, half_integer_points, minimax_sqrt_at_points, rank_one_poly_certificate,
    rank_one_rational_certificate, rho_truncate, Rho,
};
use crate::charfn::{objective, Mode, Objective};
use crate::cnf::{CnfFormula, DEFAULT_ORACLE_LIMIT};
use crate::decimal::{format_sig, round_to_rational, SIGNIFICANT_DIGITS};
use crate::error::{FsosError, Result};
use crate::fourier::{FloatPoly, Monomial, RationalPoly, Scalar};
use crate::sdp::{assemble, psd_extract, solve, ProblemKind, SolveOutcome, SolverConfig, DEFAULT_PSD_MARGIN};
use crate::validate::validate_l1;

use super::{Certificate, Metadata};

#[derive(Clone, Debug)]
pub struct BuildConfig {
    /// Truncation ratios tried for every degree, in order.
    pub rho_schedule: Vec<Rho>,
    pub max_degree: usize,
    pub solver: SolverConfig,
    pub psd_margin: f64,
    /// Wall-clock budget for the whole sweep.
    pub time_budget: Option<Duration>,
    /// Worker threads for the truncation sweep; 0 uses the global pool.
    pub threads: usize,
    pub oracle_limit: usize,
    /// Record `build_time_ms` in the metadata (off for byte-reproducible output).
    pub record_time: bool,
    /// Run the polynomial program to its optimum instead of stopping at the
    /// first residual below the acceptance threshold.
    pub minimize: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            rho_schedule: default_rho_schedule(),
            max_degree: 4,
            solver: SolverConfig::default(),
            psd_margin: DEFAULT_PSD_MARGIN,
            time_budget: None,
            threads: 0,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            record_time: true,
            minimize: false,
        }
    }
}

/// One `(d, rho)` trial of a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct Attempt {
    pub d: usize,
    pub rho: String,
    pub s_size: usize,
    pub t_size: usize,
    pub outcome: String,
    /// Float residual reported by the solver, or the exact one after rounding.
    pub residual: Option<f64>,
    pub iterations: u64,
}

/// Which Gram program an attempt solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Rational,
    Polynomial,
}

/// Supports for one attempt: `T = supp(r)`, `S = T xor supp(f)` for the
/// rational program, `S = supp(r)`, `T = {0}` for the polynomial one.
pub fn supports(r: &FloatPoly, f: &RationalPoly, shape: Shape) -> (Vec<Monomial>, Vec<Monomial>) {
    let n = f.n();
    let rs: Vec<Monomial> = r.support().cloned().collect();
    match shape {
        Shape::Polynomial => (rs, vec![Monomial::one(n)]),
        Shape::Rational => {
            let s: BTreeSet<Monomial> = rs.iter().flat_map(|t| f.support().map(move |g| t.xor(g))).collect();
            (s.into_iter().collect(), rs)
        }
    }
}

fn round_poly(p: &FloatPoly) -> RationalPoly {
    p.map(|c| round_to_rational(*c, SIGNIFICANT_DIGITS))
}

fn rho_label(rho: Rho) -> String {
    if *rho.denom() == 1 {
        rho.numer().to_string()
    } else {
        format!("{}/{}", rho.numer(), rho.denom())
    }
}

fn skeleton(phi: &CnfFormula, obj: &Objective, construction: &str) -> Certificate {
    Certificate {
        mode: obj.mode,
        l: obj.l,
        shift: obj.shift.clone(),
        n: phi.n(),
        formula_digest: phi.digest(),
        numerators: Vec::new(),
        denominators: Vec::new(),
        metadata: Metadata {
            construction: construction.into(),
            ..Metadata::default()
        },
    }
}

/// Solves the Gram program on fixed supports and returns a certificate only
/// if the exact l1 validator accepts it with room `safety / 2` to spare.
pub fn build_with_supports(
    phi: &CnfFormula,
    obj: &Objective,
    s: &[Monomial],
    t: &[Monomial],
    shape: Shape,
    cfg: &BuildConfig,
) -> Result<(Option<Certificate>, Attempt)> {
    let kind = match shape {
        Shape::Rational => ProblemKind::FeasibilityRational,
        Shape::Polynomial => ProblemKind::MinL1Poly,
    };
    let f = obj.f.to_float();
    let prob = assemble(&f, s, t, kind, cfg.psd_margin)?;
    let mut attempt = Attempt {
        d: 0,
        rho: String::new(),
        s_size: prob.s().len(),
        t_size: prob.t().len(),
        outcome: String::new(),
        residual: None,
        iterations: 0,
    };
    let mut solver = cfg.solver.clone();
    let room = 1.0 - obj.shift.to_f64();
    if kind == ProblemKind::MinL1Poly && !cfg.minimize {
        solver.stop_below = Some(room - solver.safety);
    }
    let solution = match solve(&prob, &solver)? {
        SolveOutcome::Solved { solution, .. } => solution,
        SolveOutcome::NotFound {
            best_residual,
            iterations,
            reason,
        } => {
            attempt.outcome = format!("solver: {reason}");
            attempt.residual = Some(best_residual);
            attempt.iterations = iterations;
            return Ok((None, attempt));
        }
    };
    attempt.iterations = solution.iterations;
    attempt.residual = Some(solution.l1_residual);
    if !(solution.l1_residual < room - solver.safety) {
        attempt.outcome = "solver residual too large".into();
        return Ok((None, attempt));
    }
    let n = phi.n();
    let g = psd_extract(n, &solution.u, prob.s(), 1e-8)?;
    let h = match shape {
        Shape::Rational => psd_extract(n, &solution.v, prob.t(), 1e-8)?,
        Shape::Polynomial => Vec::new(),
    };
    let construction = match shape {
        Shape::Rational => "gram-rational",
        Shape::Polynomial => "gram-polynomial",
    };
    let mut cert = skeleton(phi, obj, construction);
    cert.numerators = g.iter().map(round_poly).filter(|p| !p.is_zero()).collect();
    cert.denominators = h.iter().map(round_poly).filter(|p| !p.is_zero()).collect();
    cert.metadata.s_size = prob.s().len();
    cert.metadata.t_size = prob.t().len();
    cert.metadata.solver_iterations = Some(solution.iterations);

    let report = validate_l1(phi, &cert)?;
    let exact = report.residual.to_f64();
    attempt.residual = Some(exact);
    if !report.accepted {
        attempt.outcome = format!("rounded certificate rejected: {}", report.verdict);
        return Ok((None, attempt));
    }
    if !(exact < room - solver.safety / 2.0) {
        attempt.outcome = "rounding consumed the safety margin".into();
        return Ok((None, attempt));
    }
    cert.metadata.builder_residual = Some(format_sig(exact, 6));
    attempt.outcome = "accepted".into();
    Ok((Some(cert), attempt))
}

/// The sweep proper: for `d = 1, 2, ...` and every `rho`, in order, the first
/// validated certificate wins. Truncations of one degree run concurrently.
pub fn build_from_objective(
    phi: &CnfFormula,
    obj: &Objective,
    shape: Shape,
    cfg: &BuildConfig,
) -> Result<Certificate> {
    if cfg.rho_schedule.is_empty() {
        return Err(FsosError::InvalidArgument("empty truncation schedule".into()));
    }
    let started = Instant::now();
    let deadline = cfg.time_budget.map(|b| started + b);
    let mut solver = cfg.solver.clone();
    solver.deadline = match (solver.deadline, deadline) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let cfg = BuildConfig {
        solver,
        ..cfg.clone()
    };

    let points = half_integer_points(obj.image_upper());
    // past |points| - 1 the interpolant is exact and higher degrees add nothing
    let top = cfg.max_degree.min(points.len() - 1);
    let low = if points.len() == 1 { 0 } else { 1 };
    let f = obj.f.to_float();
    let mut attempts = Vec::new();

    let pool = if cfg.threads > 0 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build()
                .map_err(|e| FsosError::InvalidArgument(e.to_string()))?,
        )
    } else {
        None
    };

    for d in low..=top {
        if deadline.is_some_and(|t| Instant::now() >= t) {
            break;
        }
        let minimax = minimax_sqrt_at_points(&points, d)?;
        let pf = compose(&minimax.poly, &f);
        log::info!("d = {d}: minimax error {:.3e}, |supp p(f)| = {}", minimax.lambda, pf.len());
        // equal supports give equal programs; solve each once
        let mut seen = BTreeSet::new();
        let trials: Vec<(Rho, Vec<Monomial>, Vec<Monomial>)> = cfg
            .rho_schedule
            .iter()
            .filter_map(|&rho| {
                let r = rho_truncate(&pf, rho);
                let (s, t) = supports(&r, &obj.f, shape);
                seen.insert((s.clone(), t.clone())).then_some((rho, s, t))
            })
            .collect();
        // index of the earliest success so far; later trials cannot win and are skipped
        let found = AtomicUsize::new(usize::MAX);
        let run = || -> Vec<Result<Option<(Option<Certificate>, Attempt)>>> {
            trials
                .par_iter()
                .enumerate()
                .map(|(i, (rho, s, t))| {
                    if found.load(Ordering::Acquire) < i {
                        return Ok(None);
                    }
                    let (c, mut a) = build_with_supports(phi, obj, s, t, shape, &cfg)?;
                    a.d = d;
                    a.rho = rho_label(*rho);
                    log::info!(
                        "d = {d}, rho = {}: |S| = {}, |T| = {}, {} iterations: {}",
                        a.rho,
                        a.s_size,
                        a.t_size,
                        a.iterations,
                        a.outcome
                    );
                    if c.is_some() {
                        found.fetch_min(i, Ordering::AcqRel);
                    }
                    Ok(Some((c, a)))
                })
                .collect()
        };
        let results = match &pool {
            Some(p) => p.install(run),
            None => run(),
        };
        let mut winner = None;
        for res in results {
            let Some((c, a)) = res? else { continue };
            if winner.is_none() {
                if let Some(mut c) = c {
                    c.metadata.d = Some(d);
                    c.metadata.rho = Some(a.rho.clone());
                    winner = Some(c);
                }
            }
            attempts.push(a);
        }
        if let Some(mut c) = winner {
            if cfg.record_time {
                c.metadata.build_time_ms = Some(started.elapsed().as_millis() as u64);
            }
            return Ok(c);
        }
    }
    let reason = if deadline.is_some_and(|t| Instant::now() >= t) {
        "time budget exhausted".to_string()
    } else {
        format!("no certificate up to degree {top}")
    };
    Err(FsosError::BuildFailed { reason, attempts })
}

/// Rational certificate for `(phi, mode, L)`; `L = None` asks the oracle.
pub fn build(phi: &CnfFormula, mode: Mode, l: Option<i64>, cfg: &BuildConfig) -> Result<Certificate> {
    let obj = objective(phi, mode, l, cfg.oracle_limit)?;
    build_from_objective(phi, &obj, Shape::Rational, cfg)
}

/// Polynomial certificate (`T = {0}`, `V = 1`) for `(phi, mode, L)`.
pub fn build_polynomial(phi: &CnfFormula, mode: Mode, l: Option<i64>, cfg: &BuildConfig) -> Result<Certificate> {
    let obj = objective(phi, mode, l, cfg.oracle_limit)?;
    build_from_objective(phi, &obj, Shape::Polynomial, cfg)
}

/// A single square `P` with `|P^2 - target| < eps`; shift 0.
pub fn build_rank_one_polynomial(phi: &CnfFormula, obj: &Objective, eps: f64, limit: usize) -> Result<Certificate> {
    let p = rank_one_poly_certificate(obj, eps, limit)?;
    let mut c = skeleton(phi, obj, "rank-one-polynomial");
    c.shift = Zero::zero();
    c.metadata.s_size = p.len();
    c.metadata.t_size = 1;
    c.numerators = vec![p];
    Ok(c)
}

/// `g^2 / h^2` from Newman's approximant, within `1/4` of the shifted objective.
pub fn build_rank_one_rational(
    phi: &CnfFormula,
    obj: &Objective,
    degree: Option<usize>,
    limit: usize,
) -> Result<Certificate> {
    let r = rank_one_rational_certificate(obj, degree, limit)?;
    let mut c = skeleton(phi, obj, "rank-one-rational");
    c.metadata.d = Some(r.degree);
    c.metadata.s_size = r.num.len();
    c.metadata.t_size = r.den.len();
    c.numerators = vec![r.num];
    c.denominators = vec![r.den];
    Ok(c)
}
