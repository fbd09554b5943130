//! The `fsos` command line.
//!
//! Exit codes: 0 success or accept, 1 build failure, 2 reject, 3 inapplicable,
//! 64 usage error. `FSOS_THREADS` sizes the worker pool and
//! `FSOS_ORACLE_LIMIT` caps brute-force enumeration. Paths given as `-` read
//! stdin or write stdout; files are written to a temporary sibling and renamed.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::approx::{compose, half_integer_points, minimax_sqrt_at_points, parse_rho, rho_truncate, Rho};
use crate::certify::{
    build_from_objective, build_rank_one_polynomial, build_rank_one_rational, supports, BuildConfig, Certificate, Shape,
};
use crate::charfn::{objective, Mode};
use crate::cnf::{oracle_bounds, parse_dimacs, CnfFormula, DEFAULT_ORACLE_LIMIT};
use crate::corpus::{gen_random, run_experiment, summarize, write_csv, ExperimentConfig, GenSpec, Structured, Table};
use crate::error::FsosError;
use crate::fourier::DEFAULT_EXHAUSTIVE_LIMIT;
use crate::sdp::{assemble, export_sdpa, ProblemKind, DEFAULT_PSD_MARGIN};
use crate::validate::{
    validate_exhaustive_with_limit, validate_l1, validate_sampling_with_budget, Method, Verdict, DEFAULT_SAMPLE_BUDGET,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BUILD_FAILED: i32 = 1;
pub const EXIT_REJECTED: i32 = 2;
pub const EXIT_INAPPLICABLE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "fsos", version, about = "Fourier sum-of-squares certificates for MAX-SAT")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a certificate for a DIMACS formula.
    Build(BuildArgs),
    /// Check a certificate against a formula.
    Validate(ValidateArgs),
    /// Brute-force the minimum and maximum number of falsified clauses.
    Oracle(OracleArgs),
    /// Write a seeded random formula.
    Gen(GenArgs),
    /// Run a random-instance experiment and write CSV.
    Bench(BenchArgs),
    /// Write the Gram program of one sweep step in SDPA sparse format.
    ExportSdpa(ExportArgs),
}

#[derive(Args, Debug)]
struct ClaimArgs {
    /// maxsat, minsat, sat or unsat.
    #[arg(long, default_value = "maxsat")]
    mode: Mode,
    /// Claimed bound; MAXSAT/MINSAT default to the oracle's value.
    #[arg(short = 'L', long = "L", conflicts_with = "auto_l")]
    l: Option<i64>,
    /// Take L from the brute-force oracle (the default when --L is absent).
    #[arg(long = "auto-L")]
    auto_l: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Construction {
    /// Gram program with a rational denominator.
    Rational,
    /// Gram program with denominator 1.
    Polynomial,
    /// A single square from a Chebyshev approximation.
    RankOnePolynomial,
    /// One square over one square from Newman's approximation.
    RankOneRational,
}

#[derive(Args, Debug)]
struct BuildArgs {
    /// DIMACS file, or `-` for stdin.
    formula: PathBuf,
    #[command(flatten)]
    claim: ClaimArgs,
    #[arg(long, value_enum, default_value = "rational")]
    construction: Construction,
    /// Comma-separated truncation ratios, e.g. `1/3,1/2,1`.
    #[arg(long)]
    rho: Option<String>,
    /// Largest approximation degree tried.
    #[arg(long = "d-max", default_value_t = 4)]
    d_max: usize,
    /// Wall-clock budget in seconds.
    #[arg(long = "time-budget")]
    time_budget: Option<f64>,
    /// Solver iteration cap per truncation trial.
    #[arg(long = "max-iters")]
    max_iters: Option<u64>,
    /// Distance kept from the acceptance threshold while solving.
    #[arg(long)]
    safety: Option<f64>,
    /// Tolerance for the rank-one polynomial construction.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Newman degree for the rank-one rational construction.
    #[arg(long)]
    degree: Option<usize>,
    /// Omit the build time so output is byte-reproducible.
    #[arg(long)]
    reproducible: bool,
    /// Certificate JSON destination (`-` for stdout).
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
    /// Human-readable rendering; defaults to the output path with `.txt`.
    #[arg(long)]
    human: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Certificate JSON, or `-` for stdin.
    certificate: PathBuf,
    /// DIMACS file, or `-` for stdin.
    formula: PathBuf,
    /// l1, sampling or exhaustive.
    #[arg(long, default_value = "l1")]
    method: Method,
    /// Largest number of sampled points.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_BUDGET)]
    budget: u64,
    /// Largest n for exhaustive validation.
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_LIMIT)]
    limit: usize,
    /// Also write the report JSON here.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    formula: PathBuf,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(short)]
    k: usize,
    #[arg(short)]
    n: usize,
    /// Clauses drawn before duplicates are removed (default 3kn).
    #[arg(short)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Redraw until unsatisfiable.
    #[arg(long)]
    unsat: bool,
    /// Mixed-width recipe `m1,m2,m3,kappa,core`.
    #[arg(long)]
    structured: Option<String>,
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// t2, t3, t4 or t5.
    #[arg(long, default_value = "t2")]
    table: Table,
    #[arg(short, default_value_t = 3)]
    k: usize,
    #[arg(short, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    instances: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Mixed-width recipe `m1,m2,m3,kappa,core` (T4).
    #[arg(long)]
    structured: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long = "d-max", default_value_t = 4)]
    d_max: usize,
    /// Per-instance budget in seconds.
    #[arg(long = "time-budget", default_value_t = 600.0)]
    time_budget: f64,
    /// Leave wall times out so the CSV is byte-reproducible.
    #[arg(long)]
    reproducible: bool,
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct ExportArgs {
    formula: PathBuf,
    #[command(flatten)]
    claim: ClaimArgs,
    /// Export the polynomial program (T = {0}) instead of the rational one.
    #[arg(long)]
    polynomial: bool,
    #[arg(short, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value = "1/2")]
    rho: String,
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

/// An error with the exit code it maps to.
struct Failure(i32, String);

impl From<FsosError> for Failure {
    fn from(e: FsosError) -> Self {
        let code = match &e {
            FsosError::InvalidArgument(_) | FsosError::Dimacs { .. } | FsosError::Format(_) | FsosError::Json(_) => {
                EXIT_USAGE
            }
            FsosError::AboveExhaustiveLimit { .. } | FsosError::TooManyVariables(_) => EXIT_INAPPLICABLE,
            FsosError::DigestMismatch { .. } | FsosError::VersionMismatch { .. } | FsosError::WidthMismatch { .. } => {
                EXIT_REJECTED
            }
            _ => EXIT_BUILD_FAILED,
        };
        Failure(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn env_usize(name: &str) -> std::result::Result<Option<usize>, Failure> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("{name} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn read_input(path: &Path) -> std::result::Result<String, Failure> {
    let mut s = String::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut s)?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    Ok(s)
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if path == Path::new("-") {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes)?;
        return out.flush();
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn read_formula(path: &Path) -> std::result::Result<CnfFormula, Failure> {
    Ok(parse_dimacs(&read_input(path)?)?)
}

fn rho_list(s: &str) -> std::result::Result<Vec<Rho>, Failure> {
    s.split(',').map(|r| parse_rho(r.trim()).map_err(Failure::from)).collect()
}

fn structured(s: &str) -> std::result::Result<Structured, Failure> {
    let v: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage("--structured takes m1,m2,m3,kappa,core"))?;
    match v[..] {
        [m1, m2, m3, kappa, core] => Ok(Structured { m1, m2, m3, kappa, core }),
        _ => Err(usage("--structured takes m1,m2,m3,kappa,core")),
    }
}

fn budget(secs: Option<f64>) -> std::result::Result<Option<Duration>, Failure> {
    match secs {
        Some(s) if !(s > 0.0 && s.is_finite()) => Err(usage("time budget must be positive")),
        Some(s) => Ok(Some(Duration::from_secs_f64(s))),
        None => Ok(None),
    }
}

fn human_path(args: &BuildArgs) -> Option<PathBuf> {
    match &args.human {
        Some(p) => Some(p.clone()),
        None if args.output != Path::new("-") => Some(args.output.with_extension("txt")),
        None => None,
    }
}

fn cmd_build(args: BuildArgs, oracle_limit: usize, threads: usize) -> Outcome {
    let phi = read_formula(&args.formula)?;
    let mut cfg = BuildConfig {
        max_degree: args.d_max,
        time_budget: budget(args.time_budget)?,
        threads,
        oracle_limit,
        record_time: !args.reproducible,
        ..BuildConfig::default()
    };
    if let Some(r) = &args.rho {
        cfg.rho_schedule = rho_list(r)?;
    }
    if let Some(it) = args.max_iters {
        cfg.solver.max_iters = it;
    }
    if let Some(s) = args.safety {
        if !(0.0..0.5).contains(&s) {
            return Err(usage("--safety must lie in [0, 1/2)"));
        }
        cfg.solver.safety = s;
    }
    let obj = objective(&phi, args.claim.mode, args.claim.l, oracle_limit)?;
    if obj.unverified {
        log::warn!("n = {} is above the oracle limit; L = {} is unchecked", phi.n(), obj.l);
    }
    let cert = match args.construction {
        Construction::Rational => build_from_objective(&phi, &obj, Shape::Rational, &cfg),
        Construction::Polynomial => build_from_objective(&phi, &obj, Shape::Polynomial, &cfg),
        Construction::RankOnePolynomial => build_rank_one_polynomial(&phi, &obj, args.eps, oracle_limit),
        Construction::RankOneRational => build_rank_one_rational(&phi, &obj, args.degree, oracle_limit),
    };
    let cert = match cert {
        Ok(c) => c,
        Err(FsosError::BuildFailed { reason, attempts }) => {
            for a in &attempts {
                eprintln!(
                    "  d = {}, rho = {}, |S| = {}, |T| = {}: {}{}",
                    a.d,
                    a.rho,
                    a.s_size,
                    a.t_size,
                    a.outcome,
                    a.residual.map(|r| format!(" (residual {r:.3e})")).unwrap_or_default()
                );
            }
            return Err(Failure(EXIT_BUILD_FAILED, format!("build failed: {reason}")));
        }
        Err(e) => return Err(e.into()),
    };
    // rank-one certificates are emitted only if some exact method accepts them
    if matches!(args.construction, Construction::RankOnePolynomial | Construction::RankOneRational)
        && !validate_l1(&phi, &cert)?.accepted
    {
        let ex = validate_exhaustive_with_limit(&phi, &cert, oracle_limit.min(DEFAULT_EXHAUSTIVE_LIMIT))?;
        if !ex.accepted {
            return Err(Failure(
                EXIT_BUILD_FAILED,
                format!("constructed certificate not accepted ({})", ex.verdict),
            ));
        }
        log::warn!("certificate is accepted by exhaustive validation only");
    }
    write_atomic(&args.output, cert.to_json()?.as_bytes())?;
    if let Some(h) = human_path(&args) {
        write_atomic(&h, cert.render_human().as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn cmd_validate(args: ValidateArgs, oracle_limit: usize) -> Outcome {
    if args.certificate == Path::new("-") && args.formula == Path::new("-") {
        return Err(usage("only one of certificate and formula can come from stdin"));
    }
    let cert = Certificate::from_json(&read_input(&args.certificate)?)?;
    let phi = read_formula(&args.formula)?;
    let report = match args.method {
        Method::L1 => validate_l1(&phi, &cert),
        Method::Sampling => validate_sampling_with_budget(&phi, &cert, args.budget),
        Method::Exhaustive => validate_exhaustive_with_limit(&phi, &cert, args.limit.min(oracle_limit.max(args.limit))),
    }?;
    let json = report.to_json()?;
    if let Some(out) = &args.output {
        write_atomic(out, json.as_bytes())?;
    }
    print!("{json}");
    Ok(match report.verdict {
        Verdict::Accepted => EXIT_OK,
        Verdict::Inapplicable => EXIT_INAPPLICABLE,
        Verdict::ResidualTooLarge | Verdict::DenominatorUnproven => EXIT_REJECTED,
    })
}

fn cmd_oracle(args: OracleArgs, oracle_limit: usize) -> Outcome {
    let phi = read_formula(&args.formula)?;
    let b = oracle_bounds(&phi, oracle_limit)?;
    println!("n={} m={}", phi.n(), phi.m());
    println!("L_min={}", b.l_min);
    println!("L_max={}", b.l_max);
    println!("witness_min={}", b.witness_min);
    println!("witness_max={}", b.witness_max);
    Ok(EXIT_OK)
}

fn cmd_gen(args: GenArgs, oracle_limit: usize) -> Outcome {
    let mut spec = GenSpec::new(args.k, args.n, args.seed);
    if let Some(m) = args.m {
        spec.m = m;
    }
    spec.require_unsat = args.unsat;
    spec.structured = args.structured.as_deref().map(structured).transpose()?;
    let phi = gen_random(&spec, oracle_limit)?;
    let mut text = format!("c fsos gen k={} n={} m={} seed={}", spec.k, spec.n, spec.m, spec.seed);
    if let Some(s) = &spec.structured {
        text += &format!(" structured={},{},{},{},{}", s.m1, s.m2, s.m3, s.kappa, s.core);
    }
    if spec.require_unsat {
        text += " unsat";
    }
    text.push('\n');
    text += &phi.to_dimacs();
    write_atomic(&args.output, text.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_bench(args: BenchArgs, oracle_limit: usize, threads: usize) -> Outcome {
    let mut build = BuildConfig {
        max_degree: args.d_max,
        time_budget: budget(Some(args.time_budget))?,
        threads,
        oracle_limit,
        record_time: false,
        ..BuildConfig::default()
    };
    match (&args.rho, args.table) {
        (Some(r), _) => build.rho_schedule = rho_list(r)?,
        // the minimization experiment starts at 1/2
        (None, Table::T3) => build.rho_schedule.retain(|r| *r >= Rho::new(1, 2)),
        _ => {}
    }
    let cfg = ExperimentConfig {
        table: args.table,
        k: args.k,
        n: args.n,
        instances: args.instances,
        seed: args.seed,
        structured: args.structured.as_deref().map(structured).transpose()?,
        build,
        reproducible: args.reproducible,
    };
    let rows = run_experiment(&cfg)?;
    let mut csv = Vec::new();
    write_csv(&rows, &mut csv)?;
    write_atomic(&args.output, &csv)?;
    eprint!("seeds {}..{}\n{}", args.seed, args.seed + args.instances as u64, summarize(args.table, &rows));
    Ok(EXIT_OK)
}

fn cmd_export(args: ExportArgs, oracle_limit: usize) -> Outcome {
    let phi = read_formula(&args.formula)?;
    let obj = objective(&phi, args.claim.mode, args.claim.l, oracle_limit)?;
    let rho = parse_rho(&args.rho)?;
    let points = half_integer_points(obj.image_upper());
    let d = args.d.min(points.len() - 1);
    let p = minimax_sqrt_at_points(&points, d)?;
    let r = rho_truncate(&compose(&p.poly, &obj.f.to_float()), rho);
    let (shape, kind) = if args.polynomial {
        (Shape::Polynomial, ProblemKind::MinL1Poly)
    } else {
        (Shape::Rational, ProblemKind::FeasibilityRational)
    };
    let (s, t) = supports(&r, &obj.f, shape);
    let prob = assemble(&obj.f.to_float(), &s, &t, kind, DEFAULT_PSD_MARGIN)?;
    write_atomic(&args.output, export_sdpa(&prob).as_bytes())?;
    Ok(EXIT_OK)
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.verbose);
    let result = (|| -> Outcome {
        let threads = env_usize("FSOS_THREADS")?.unwrap_or(0);
        let oracle_limit = env_usize("FSOS_ORACLE_LIMIT")?.unwrap_or(DEFAULT_ORACLE_LIMIT);
        if threads > 0 {
            // a pool may already exist when run in-process more than once
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
        match cli.command {
            Command::Build(a) => cmd_build(a, oracle_limit, threads),
            Command::Validate(a) => cmd_validate(a, oracle_limit),
            Command::Oracle(a) => cmd_oracle(a, oracle_limit),
            Command::Gen(a) => cmd_gen(a, oracle_limit),
            Command::Bench(a) => cmd_bench(a, oracle_limit, threads),
            Command::ExportSdpa(a) => cmd_export(a, oracle_limit),
        }
    })();
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            eprintln!("fsos: {msg}");
            code
        }
    }
}
