#ifndef FSOS_H
#define FSOS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every call. The first four values match the command-line exit codes.
typedef enum FsosStatus {
  FSOS_STATUS_OK = 0,
  FSOS_STATUS_BUILD_FAILED = 1,
  FSOS_STATUS_REJECTED = 2,
  FSOS_STATUS_INAPPLICABLE = 3,
  FSOS_STATUS_INVALID_ARGUMENT = 4,
  FSOS_STATUS_NULL_POINTER = 5,
  FSOS_STATUS_PARSE = 6,
  FSOS_STATUS_BOUND_REFUSED = 7,
  FSOS_STATUS_PANIC = 8,
} FsosStatus;

// A certificate, built or loaded from JSON.
typedef struct FsosCertificate FsosCertificate;

// A parsed CNF formula.
typedef struct FsosFormula FsosFormula;

// The outcome of one validation run.
typedef struct FsosReport FsosReport;

// Options for [`fsos_build`]. Zero-initialized options are valid defaults
// except `mode`, which must be set.
typedef struct FsosBuildOptions {
  // "maxsat", "minsat", "sat" or "unsat".
  const char *mode;
  // When false the bound comes from the brute-force oracle.
  bool has_bound;
  int64_t bound;
  // Denominator 1 instead of a rational certificate.
  bool polynomial;
  // Largest approximation degree; 0 means the default.
  uintptr_t max_degree;
  // Worker threads; 0 uses the global pool.
  uintptr_t threads;
  // Wall-clock budget in seconds; 0 means none.
  double time_budget_secs;
  // Leave the build time out of the certificate.
  bool reproducible;
} FsosBuildOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The message for the last failed call on this thread, or NULL.
//
// The pointer stays valid until the next failing call on the same thread.
const char *fsos_last_error(void);

// Library version as a static string.
const char *fsos_version(void);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void fsos_string_free(char *s);

// Parses DIMACS text into a new formula handle.
//
// # Safety
// `dimacs` must be a NUL-terminated string and `out_formula` writable.
enum FsosStatus fsos_formula_parse(const char *dimacs, struct FsosFormula **out_formula);

// # Safety
// `formula` must be NULL or a live handle from [`fsos_formula_parse`].
void fsos_formula_free(struct FsosFormula *formula);

// Number of variables, or 0 for NULL.
//
// # Safety
// `formula` must be NULL or a live handle.
uintptr_t fsos_formula_num_vars(const struct FsosFormula *formula);

// Number of clauses, or 0 for NULL.
//
// # Safety
// `formula` must be NULL or a live handle.
uintptr_t fsos_formula_num_clauses(const struct FsosFormula *formula);

// Minimum and maximum number of falsified clauses by enumeration.
//
// `limit` caps the number of variables; 0 means the default.
//
// # Safety
// `formula` must be a live handle; `l_min` and `l_max` must be writable.
enum FsosStatus fsos_formula_oracle(const struct FsosFormula *formula,
                                    uintptr_t limit,
                                    uint64_t *l_min,
                                    uint64_t *l_max);

// Builds a certificate for `formula`.
//
// # Safety
// `formula` must be a live handle, `options` readable with a valid `mode`
// string, and `out_certificate` writable.
enum FsosStatus fsos_build(const struct FsosFormula *formula,
                           const struct FsosBuildOptions *options,
                           struct FsosCertificate **out_certificate);

// Loads a certificate from its JSON form.
//
// # Safety
// `json` must be a NUL-terminated string and `out_certificate` writable.
enum FsosStatus fsos_certificate_from_json(const char *json,
                                           struct FsosCertificate **out_certificate);

// JSON form of a certificate; free with [`fsos_string_free`].
//
// # Safety
// `certificate` must be a live handle and `out_json` writable.
enum FsosStatus fsos_certificate_to_json(const struct FsosCertificate *certificate,
                                         char **out_json);

// Human-readable rendering; free with [`fsos_string_free`]. NULL for NULL.
//
// # Safety
// `certificate` must be NULL or a live handle.
char *fsos_certificate_render(const struct FsosCertificate *certificate);

// # Safety
// `certificate` must be NULL or a live handle.
void fsos_certificate_free(struct FsosCertificate *certificate);

// Validates `certificate` against `formula` with "l1", "sampling" or
// "exhaustive". The call succeeds whenever validation ran; the verdict is
// read from the report. A certificate for a different formula gives
// [`FsosStatus::Rejected`] and no report.
//
// # Safety
// Handles must be live, `method` a NUL-terminated string, `out_report` writable.
enum FsosStatus fsos_validate(const struct FsosFormula *formula,
                              const struct FsosCertificate *certificate,
                              const char *method,
                              struct FsosReport **out_report);

// [`FsosStatus::Ok`] if accepted, otherwise `Rejected` or `Inapplicable`.
//
// # Safety
// `report` must be a live handle.
enum FsosStatus fsos_report_status(const struct FsosReport *report);

// The exact residual as a reduced fraction `p/q`; free with [`fsos_string_free`].
//
// # Safety
// `report` must be NULL or a live handle.
char *fsos_report_residual(const struct FsosReport *report);

// The residual rounded to double precision; NaN for NULL.
//
// # Safety
// `report` must be NULL or a live handle.
double fsos_report_residual_approx(const struct FsosReport *report);

// Full report as JSON; free with [`fsos_string_free`].
//
// # Safety
// `report` must be a live handle and `out_json` writable.
enum FsosStatus fsos_report_to_json(const struct FsosReport *report, char **out_json);

// # Safety
// `report` must be NULL or a live handle.
void fsos_report_free(struct FsosReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FSOS_H */
