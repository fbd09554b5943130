//! Desk-scale versions of the random-instance experiments.
//!
//! * `T2`: the full builder sweep for polynomial certificates, per instance.
//! * `T3`: `d = 1`, each truncation ratio in turn, polynomial program run to
//!   its optimum; the sweep stops at the first ratio that certifies every
//!   instance.
//! * `T4`: like `T2` on instances from the mixed-width recipe.
//! * `T5`: for `d = 1, 2`, the covering length `l_cover` (first `s` terms of
//!   `p_d(f)` by magnitude containing `supp(f)`) and the certifying length
//!   `l_cert` (shortest such prefix supporting a validated certificate).

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{compose, half_integer_points, minimal_support_len, minimax_sqrt_at_points, Rho};
use crate::certify::{build_from_objective, build_with_supports, supports, BuildConfig, Certificate, Shape};
use crate::charfn::{objective, Mode, Objective};
use crate::cnf::CnfFormula;
use crate::decimal::format_sig;
use crate::error::{FsosError, Result};
use crate::fourier::{FloatPoly, Monomial, Scalar};
use crate::validate::validate_l1;

use super::generate::{gen_random, GenSpec, Structured};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Table {
    T2,
    T3,
    T4,
    T5,
}

impl FromStr for Table {
    type Err = FsosError;

    fn from_str(s: &str) -> Result<Table> {
        match s.to_ascii_uppercase().as_str() {
            "T2" => Ok(Table::T2),
            "T3" => Ok(Table::T3),
            "T4" => Ok(Table::T4),
            "T5" => Ok(Table::T5),
            _ => Err(FsosError::InvalidArgument(format!("unknown experiment {s:?}; use t2, t3, t4 or t5"))),
        }
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub table: Table,
    pub k: usize,
    pub n: usize,
    pub instances: usize,
    /// Instance `i` is generated from seed `seed + i`.
    pub seed: u64,
    /// Required for `T4`.
    pub structured: Option<Structured>,
    /// Per-instance builder settings; `time_budget` bounds each instance.
    pub build: BuildConfig,
    /// Leave the wall-time column empty so output is byte-reproducible.
    pub reproducible: bool,
}

/// One CSV row. Columns that do not apply to a table stay empty.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub instance: usize,
    pub seed: u64,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub supp_f: usize,
    pub rho: Option<String>,
    pub d: Option<usize>,
    pub wall_ms: Option<u64>,
    /// Re-derived by the exact l1 validator.
    pub accepted: bool,
    pub residual: Option<String>,
    pub l_cover_d1: Option<usize>,
    pub l_cover_d2: Option<usize>,
    pub l_cert_d1: Option<usize>,
    pub l_cert_d2: Option<usize>,
    pub note: String,
}

impl ExperimentRow {
    fn new(instance: usize, spec: &GenSpec, phi: &CnfFormula, obj: &Objective) -> Self {
        ExperimentRow {
            instance,
            seed: spec.seed,
            k: spec.k,
            n: phi.n(),
            m: phi.m(),
            supp_f: obj.f.len(),
            rho: None,
            d: None,
            wall_ms: None,
            accepted: false,
            residual: None,
            l_cover_d1: None,
            l_cover_d2: None,
            l_cert_d1: None,
            l_cert_d2: None,
            note: String::new(),
        }
    }
}

fn spec_for(cfg: &ExperimentConfig, i: usize) -> GenSpec {
    let mut spec = GenSpec::new(cfg.k, cfg.n, cfg.seed.wrapping_add(i as u64));
    spec.require_unsat = true;
    if cfg.table == Table::T4 {
        spec.k = 3;
        spec.structured = cfg.structured;
    }
    spec
}

/// Accepts only what the exact validator accepts.
fn record(row: &mut ExperimentRow, phi: &CnfFormula, cert: &Certificate) -> Result<()> {
    let report = validate_l1(phi, cert)?;
    row.accepted = report.accepted;
    row.residual = Some(format_sig(report.residual.to_f64(), 6));
    row.d = cert.metadata.d;
    row.rho = cert.metadata.rho.clone();
    Ok(())
}

fn elapsed_ms(t: Instant, reproducible: bool) -> Option<u64> {
    (!reproducible).then(|| t.elapsed().as_millis() as u64)
}

fn sweep_row(cfg: &ExperimentConfig, row: &mut ExperimentRow, phi: &CnfFormula, obj: &Objective) -> Result<()> {
    let started = Instant::now();
    let build = BuildConfig {
        record_time: false,
        ..cfg.build.clone()
    };
    match build_from_objective(phi, obj, Shape::Polynomial, &build) {
        Ok(cert) => record(row, phi, &cert)?,
        Err(FsosError::BuildFailed { reason, attempts }) => {
            row.note = format!("{reason} ({} attempts)", attempts.len());
        }
        Err(e) => return Err(e),
    }
    row.wall_ms = elapsed_ms(started, cfg.reproducible);
    Ok(())
}

fn p_of_f(obj: &Objective, d: usize) -> Result<FloatPoly> {
    let points = half_integer_points(obj.image_upper());
    let d = d.min(points.len() - 1);
    let p = minimax_sqrt_at_points(&points, d)?;
    Ok(compose(&p.poly, &obj.f.to_float()))
}

/// Shortest prefix of `p` (by magnitude) that supports a validated polynomial
/// certificate: doubling until success, then bisection.
fn certifying_length(phi: &CnfFormula, obj: &Objective, p: &FloatPoly, build: &BuildConfig) -> Result<Option<usize>> {
    let order: Vec<Monomial> = p.terms_by_magnitude().into_iter().map(|(m, _)| m.clone()).collect();
    let one = vec![Monomial::one(phi.n())];
    let works = |s: usize| -> Result<bool> {
        let (cert, _) = build_with_supports(phi, obj, &order[..s], &one, Shape::Polynomial, build)?;
        Ok(cert.is_some())
    };
    let total = order.len();
    let (mut lo, mut hi) = (0, 1.min(total));
    while hi <= total && !works(hi)? {
        if hi == total {
            return Ok(None);
        }
        lo = hi;
        hi = (2 * hi).min(total);
    }
    // works(hi), and lo fails or is zero
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if works(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

fn support_row(cfg: &ExperimentConfig, row: &mut ExperimentRow, phi: &CnfFormula, obj: &Objective) -> Result<()> {
    let started = Instant::now();
    let build = BuildConfig {
        record_time: false,
        ..cfg.build.clone()
    };
    let p1 = p_of_f(obj, 1)?;
    let p2 = p_of_f(obj, 2)?;
    row.l_cover_d1 = minimal_support_len(&p1, &obj.f);
    row.l_cover_d2 = minimal_support_len(&p2, &obj.f);
    row.l_cert_d1 = certifying_length(phi, obj, &p1, &build)?;
    row.l_cert_d2 = certifying_length(phi, obj, &p2, &build)?;
    row.accepted = row.l_cert_d1.is_some() && row.l_cert_d2.is_some();
    row.wall_ms = elapsed_ms(started, cfg.reproducible);
    Ok(())
}

/// Rows for one `rho` of the minimization experiment.
fn minimization_rows(
    cfg: &ExperimentConfig,
    instances: &[(usize, GenSpec, CnfFormula, Objective)],
    rho: Rho,
) -> Result<Vec<ExperimentRow>> {
    let build = BuildConfig {
        record_time: false,
        minimize: true,
        ..cfg.build.clone()
    };
    instances
        .par_iter()
        .map(|(i, spec, phi, obj)| {
            let mut row = ExperimentRow::new(*i, spec, phi, obj);
            let started = Instant::now();
            let p1 = p_of_f(obj, 1)?;
            let r = crate::approx::rho_truncate(&p1, rho);
            let (s, t) = supports(&r, &obj.f, Shape::Polynomial);
            let (cert, attempt) = build_with_supports(phi, obj, &s, &t, Shape::Polynomial, &build)?;
            match cert {
                Some(c) => record(&mut row, phi, &c)?,
                None => {
                    row.residual = attempt.residual.map(|r| format_sig(r, 6));
                    row.note = attempt.outcome;
                }
            }
            row.d = Some(1);
            row.rho = Some(format!("{}/{}", rho.numer(), rho.denom()));
            row.wall_ms = elapsed_ms(started, cfg.reproducible);
            Ok(row)
        })
        .collect()
}

/// Runs one experiment; rows come back ordered by instance.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    if cfg.table == Table::T4 && cfg.structured.is_none() {
        return Err(FsosError::InvalidArgument("T4 needs a structured recipe".into()));
    }
    let limit = cfg.build.oracle_limit;
    let instances: Vec<(usize, GenSpec, CnfFormula, Objective)> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| {
            let spec = spec_for(cfg, i);
            let phi = gen_random(&spec, limit)?;
            let obj = objective(&phi, Mode::Maxsat, None, limit)?;
            Ok((i, spec, phi, obj))
        })
        .collect::<Result<_>>()?;

    match cfg.table {
        Table::T3 => {
            let mut rows = Vec::new();
            for &rho in &cfg.build.rho_schedule {
                let batch = minimization_rows(cfg, &instances, rho)?;
                let all = batch.iter().all(|r| r.accepted);
                rows.extend(batch);
                if all {
                    break;
                }
            }
            rows.sort_by_key(|r| r.instance);
            Ok(rows)
        }
        Table::T2 | Table::T4 | Table::T5 => instances
            .par_iter()
            .map(|(i, spec, phi, obj)| {
                let mut row = ExperimentRow::new(*i, spec, phi, obj);
                if cfg.table == Table::T5 {
                    support_row(cfg, &mut row, phi, obj)?;
                } else {
                    sweep_row(cfg, &mut row, phi, obj)?;
                }
                Ok(row)
            })
            .collect(),
    }
}

/// Writes rows as CSV with a header line, even when there are no rows.
pub fn write_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub const CSV_HEADER: [&str; 16] = [
    "instance",
    "seed",
    "k",
    "n",
    "m",
    "supp_f",
    "rho",
    "d",
    "wall_ms",
    "accepted",
    "residual",
    "l_cover_d1",
    "l_cover_d2",
    "l_cert_d1",
    "l_cert_d2",
    "note",
];

fn csv_err(e: csv::Error) -> FsosError {
    FsosError::Format(format!("csv: {e}"))
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[h] } else { (v[h - 1] + v[h]) / 2.0 })
}

/// Aggregates in the layout of the published tables.
pub fn summarize(table: Table, rows: &[ExperimentRow]) -> String {
    let show = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.1}"));
    let secs = |rs: &[&ExperimentRow]| -> Vec<f64> {
        rs.iter().filter_map(|r| r.wall_ms).map(|ms| ms as f64 / 1000.0).collect()
    };
    let all: Vec<&ExperimentRow> = rows.iter().collect();
    let m: Vec<f64> = all.iter().map(|r| r.m as f64).collect();
    let supp: Vec<f64> = all.iter().map(|r| r.supp_f as f64).collect();
    let mut out = format!("{table}: mean m {}, mean |supp f| {}\n", show(mean(&m)), show(mean(&supp)));
    match table {
        Table::T2 | Table::T4 => {
            let ok = all.iter().filter(|r| r.accepted).count();
            let t = secs(&all);
            out += &format!(
                "verified {ok}/{}, time (mean, median) = ({}, {}) s\n",
                all.len(),
                show(mean(&t)),
                show(median(&t))
            );
        }
        Table::T3 => {
            let mut ratios: Vec<String> = Vec::new();
            for r in &all {
                if let Some(rho) = &r.rho {
                    if !ratios.contains(rho) {
                        ratios.push(rho.clone());
                    }
                }
            }
            for rho in ratios {
                let rs: Vec<&ExperimentRow> = all.iter().copied().filter(|r| r.rho.as_ref() == Some(&rho)).collect();
                let ok = rs.iter().filter(|r| r.accepted).count();
                out += &format!("rho = {rho}: ({}, {ok})\n", show(mean(&secs(&rs))));
            }
        }
        Table::T5 => {
            let col = |f: fn(&ExperimentRow) -> Option<usize>| -> Vec<f64> {
                all.iter().filter_map(|r| f(r)).map(|v| v as f64).collect()
            };
            let c1 = mean(&col(|r| r.l_cert_d1));
            let c2 = mean(&col(|r| r.l_cert_d2));
            let rate = match (c1, c2) {
                (Some(a), Some(b)) if a > 0.0 => format!("{:.1}%", 100.0 * (a - b) / a),
                _ => "-".into(),
            };
            out += &format!(
                "l_cover (d=1, d=2) = ({}, {}); l_cert (d=1, d=2) = ({}, {}); decrease rate {rate}\n",
                show(mean(&col(|r| r.l_cover_d1))),
                show(mean(&col(|r| r.l_cover_d2))),
                show(c1),
                show(c2)
            );
        }
    }
    out
}
