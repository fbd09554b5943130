//! C ABI over the `fsos` library.
//!
//! Formulas, certificates and validation reports cross the boundary as opaque
//! handles owned by the caller and released with the matching `*_free`
//! function. Every entry point returns an [`FsosStatus`]; on failure
//! [`fsos_last_error`] describes what went wrong on the calling thread.
//! Strings returned by the library are NUL-terminated UTF-8 and must be
//! released with [`fsos_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fsos::certify::{build_from_objective, BuildConfig, Certificate, Shape};
use fsos::charfn::{objective, Mode};
use fsos::cnf::{oracle_bounds, parse_dimacs, CnfFormula, DEFAULT_ORACLE_LIMIT};
use fsos::error::FsosError;
use fsos::validate::{validate, Method, ValidationReport, Verdict};

/// Result of every call. The first four values match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FsosStatus {
    Ok = 0,
    BuildFailed = 1,
    Rejected = 2,
    Inapplicable = 3,
    InvalidArgument = 4,
    NullPointer = 5,
    Parse = 6,
    BoundRefused = 7,
    Panic = 8,
}

/// A parsed CNF formula.
pub struct FsosFormula(CnfFormula);

/// A certificate, built or loaded from JSON.
pub struct FsosCertificate(Certificate);

/// The outcome of one validation run.
pub struct FsosReport(ValidationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &FsosError) -> FsosStatus {
    match e {
        FsosError::Dimacs { .. } | FsosError::Format(_) | FsosError::Json(_) | FsosError::MalformedDecimal(_) => {
            FsosStatus::Parse
        }
        FsosError::BoundRefused { .. } => FsosStatus::BoundRefused,
        FsosError::BuildFailed { .. } | FsosError::Approximation(_) | FsosError::Hypothesis(_) => {
            FsosStatus::BuildFailed
        }
        FsosError::AboveExhaustiveLimit { .. } | FsosError::TooManyVariables(_) => FsosStatus::Inapplicable,
        FsosError::DigestMismatch { .. } | FsosError::VersionMismatch { .. } | FsosError::WidthMismatch { .. } => {
            FsosStatus::Rejected
        }
        _ => FsosStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic for [`fsos_last_error`].
fn guard(f: impl FnOnce() -> Result<(), FsosStatus>) -> FsosStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FsosStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            FsosStatus::Panic
        }
    }
}

fn fail(e: FsosError) -> FsosStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, FsosStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(FsosStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        FsosStatus::InvalidArgument
    })
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, FsosStatus> {
    p.as_ref().ok_or_else(|| {
        set_error(format!("{what} is null"));
        FsosStatus::NullPointer
    })
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, FsosStatus> {
    p.as_mut().ok_or_else(|| {
        set_error(format!("{what} is null"));
        FsosStatus::NullPointer
    })
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// The message for the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fsos_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fsos_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fsos_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses DIMACS text into a new formula handle.
///
/// # Safety
/// `dimacs` must be a NUL-terminated string and `out_formula` writable.
#[no_mangle]
pub unsafe extern "C" fn fsos_formula_parse(dimacs: *const c_char, out_formula: *mut *mut FsosFormula) -> FsosStatus {
    guard(|| {
        let slot = out(out_formula, "out_formula")?;
        *slot = ptr::null_mut();
        let phi = parse_dimacs(text(dimacs, "dimacs")?).map_err(fail)?;
        *slot = Box::into_raw(Box::new(FsosFormula(phi)));
        Ok(())
    })
}

/// # Safety
/// `formula` must be NULL or a live handle from [`fsos_formula_parse`].
#[no_mangle]
pub unsafe extern "C" fn fsos_formula_free(formula: *mut FsosFormula) {
    if !formula.is_null() {
        drop(Box::from_raw(formula));
    }
}

/// Number of variables, or 0 for NULL.
///
/// # Safety
/// `formula` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsos_formula_num_vars(formula: *const FsosFormula) -> usize {
    formula.as_ref().map_or(0, |f| f.0.n())
}

/// Number of clauses, or 0 for NULL.
///
/// # Safety
/// `formula` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsos_formula_num_clauses(formula: *const FsosFormula) -> usize {
    formula.as_ref().map_or(0, |f| f.0.m())
}

/// Minimum and maximum number of falsified clauses by enumeration.
///
/// `limit` caps the number of variables; 0 means the default.
///
/// # Safety
/// `formula` must be a live handle; `l_min` and `l_max` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fsos_formula_oracle(
    formula: *const FsosFormula,
    limit: usize,
    l_min: *mut u64,
    l_max: *mut u64,
) -> FsosStatus {
    guard(|| {
        let phi = &handle(formula, "formula")?.0;
        let (lo, hi) = (out(l_min, "l_min")?, out(l_max, "l_max")?);
        let limit = if limit == 0 { DEFAULT_ORACLE_LIMIT } else { limit };
        let b = oracle_bounds(phi, limit).map_err(fail)?;
        *lo = b.l_min as u64;
        *hi = b.l_max as u64;
        Ok(())
    })
}

/// Options for [`fsos_build`]. Zero-initialized options are valid defaults
/// except `mode`, which must be set.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct FsosBuildOptions {
    /// "maxsat", "minsat", "sat" or "unsat".
    pub mode: *const c_char,
    /// When false the bound comes from the brute-force oracle.
    pub has_bound: bool,
    pub bound: i64,
    /// Denominator 1 instead of a rational certificate.
    pub polynomial: bool,
    /// Largest approximation degree; 0 means the default.
    pub max_degree: usize,
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
    /// Wall-clock budget in seconds; 0 means none.
    pub time_budget_secs: f64,
    /// Leave the build time out of the certificate.
    pub reproducible: bool,
}

/// Builds a certificate for `formula`.
///
/// # Safety
/// `formula` must be a live handle, `options` readable with a valid `mode`
/// string, and `out_certificate` writable.
#[no_mangle]
pub unsafe extern "C" fn fsos_build(
    formula: *const FsosFormula,
    options: *const FsosBuildOptions,
    out_certificate: *mut *mut FsosCertificate,
) -> FsosStatus {
    guard(|| {
        let slot = out(out_certificate, "out_certificate")?;
        *slot = ptr::null_mut();
        let phi = &handle(formula, "formula")?.0;
        let opts = handle(options, "options")?;
        let mode: Mode = text(opts.mode, "mode")?.parse().map_err(fail)?;
        let mut cfg = BuildConfig {
            threads: opts.threads,
            record_time: !opts.reproducible,
            ..BuildConfig::default()
        };
        if opts.max_degree > 0 {
            cfg.max_degree = opts.max_degree;
        }
        if opts.time_budget_secs > 0.0 {
            if !opts.time_budget_secs.is_finite() {
                set_error("time budget must be finite");
                return Err(FsosStatus::InvalidArgument);
            }
            cfg.time_budget = Some(std::time::Duration::from_secs_f64(opts.time_budget_secs));
        }
        let bound = opts.has_bound.then_some(opts.bound);
        let obj = objective(phi, mode, bound, cfg.oracle_limit).map_err(fail)?;
        let shape = if opts.polynomial { Shape::Polynomial } else { Shape::Rational };
        let cert = build_from_objective(phi, &obj, shape, &cfg).map_err(fail)?;
        *slot = Box::into_raw(Box::new(FsosCertificate(cert)));
        Ok(())
    })
}

/// Loads a certificate from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_certificate` writable.
#[no_mangle]
pub unsafe extern "C" fn fsos_certificate_from_json(
    json: *const c_char,
    out_certificate: *mut *mut FsosCertificate,
) -> FsosStatus {
    guard(|| {
        let slot = out(out_certificate, "out_certificate")?;
        *slot = ptr::null_mut();
        let cert = Certificate::from_json(text(json, "json")?).map_err(fail)?;
        *slot = Box::into_raw(Box::new(FsosCertificate(cert)));
        Ok(())
    })
}

/// JSON form of a certificate; free with [`fsos_string_free`].
///
/// # Safety
/// `certificate` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn fsos_certificate_to_json(
    certificate: *const FsosCertificate,
    out_json: *mut *mut c_char,
) -> FsosStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        let json = handle(certificate, "certificate")?.0.to_json().map_err(fail)?;
        *slot = into_c(json);
        Ok(())
    })
}

/// Human-readable rendering; free with [`fsos_string_free`]. NULL for NULL.
///
/// # Safety
/// `certificate` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsos_certificate_render(certificate: *const FsosCertificate) -> *mut c_char {
    certificate
        .as_ref()
        .map_or(ptr::null_mut(), |c| into_c(c.0.render_human()))
}

/// # Safety
/// `certificate` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsos_certificate_free(certificate: *mut FsosCertificate) {
    if !certificate.is_null() {
        drop(Box::from_raw(certificate));
    }
}

/// Validates `certificate` against `formula` with "l1", "sampling" or
/// "exhaustive". The call succeeds whenever validation ran; the verdict is
/// read from the report. A certificate for a different formula gives
/// [`FsosStatus::Rejected`] and no report.
///
/// # Safety
/// Handles must be live, `method` a NUL-terminated string, `out_report` writable.
#[no_mangle]
pub unsafe extern "C" fn fsos_validate(
    formula: *const FsosFormula,
    certificate: *const FsosCertificate,
    method: *const c_char,
    out_report: *mut *mut FsosReport,
) -> FsosStatus {
    guard(|| {
        let slot = out(out_report, "out_report")?;
        *slot = ptr::null_mut();
        let phi = &handle(formula, "formula")?.0;
        let cert = &handle(certificate, "certificate")?.0;
        let method: Method = text(method, "method")?.parse().map_err(fail)?;
        let report = validate(phi, cert, method).map_err(fail)?;
        *slot = Box::into_raw(Box::new(FsosReport(report)));
        Ok(())
    })
}

/// [`FsosStatus::Ok`] if accepted, otherwise `Rejected` or `Inapplicable`.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsos_report_status(report: *const FsosReport) -> FsosStatus {
    match report.as_ref().map(|r| r.0.verdict) {
        None => FsosStatus::NullPointer,
        Some(Verdict::Accepted) => FsosStatus::Ok,
        Some(Verdict::Inapplicable) => FsosStatus::Inapplicable,
        Some(Verdict::ResidualTooLarge | Verdict::DenominatorUnproven) => FsosStatus::Rejected,
    }
}

/// The exact residual as a reduced fraction `p/q`; free with [`fsos_string_free`].
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsos_report_residual(report: *const FsosReport) -> *mut c_char {
    report.as_ref().map_or(ptr::null_mut(), |r| into_c(r.0.residual.to_string()))
}

/// The residual rounded to double precision; NaN for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsos_report_residual_approx(report: *const FsosReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.residual_approx)
}

/// Full report as JSON; free with [`fsos_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn fsos_report_to_json(report: *const FsosReport, out_json: *mut *mut c_char) -> FsosStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        let json = handle(report, "report")?.0.to_json().map_err(fail)?;
        *slot = into_c(json);
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsos_report_free(report: *mut FsosReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
