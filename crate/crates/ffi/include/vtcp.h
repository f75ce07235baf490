#ifndef VTCP_H
#define VTCP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  VTCP_STATUS_OK = 0,
  VTCP_STATUS_NULL_POINTER = 1,
  VTCP_STATUS_INVALID_ARGUMENT = 2,
  VTCP_STATUS_PARSE = 3,
  VTCP_STATUS_IO = 4,
  VTCP_STATUS_UNKNOWN = 5,
  VTCP_STATUS_PRECONDITION = 6,
  VTCP_STATUS_NOT_CONVERGED = 7,
  VTCP_STATUS_DOMAIN = 8,
  VTCP_STATUS_BUFFER_TOO_SMALL = 9,
  VTCP_STATUS_PANIC = 99,
} VtcpStatus;

/**
 * Termination state stored in a solve report.
 */
typedef enum {
  VTCP_SOLVE_STATUS_CONVERGED = 0,
  VTCP_SOLVE_STATUS_MAX_ITERS = 1,
  VTCP_SOLVE_STATUS_DIVERGED = 2,
  VTCP_SOLVE_STATUS_PRECONDITION_FAILED = 3,
} VtcpSolveStatus;

/**
 * Solver selector for [`vtcp_solve`].
 */
typedef enum {
  VTCP_METHOD_NEWTON = 0,
  VTCP_METHOD_HOMOTOPY = 1,
  VTCP_METHOD_MTENSOR = 2,
  VTCP_METHOD_ORACLE = 3,
} VtcpMethod;

/**
 * A problem instance: two tensors and two vectors.
 */
typedef struct VtcpInstance VtcpInstance;

/**
 * Outcome of one solver run.
 */
typedef struct VtcpReport VtcpReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *vtcp_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays valid until
 * the next failing call or [`vtcp_clear_error`] on the same thread.
 */
const char *vtcp_last_error_message(void);

void vtcp_clear_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 */
void vtcp_string_free(char *s);

/**
 * Builds an instance from row-major tensor entries. `a1` and `a2` hold `dim^order`
 * values, `q1` and `q2` hold `dim` values.
 */
VtcpStatus vtcp_instance_new(size_t order,
                             size_t dim,
                             const double *a1,
                             const double *a2,
                             const double *q1,
                             const double *q2,
                             VtcpInstance **out_instance);

/**
 * Parses an instance from JSON text in the instance file format.
 */
VtcpStatus vtcp_instance_from_json(const char *json, VtcpInstance **out_instance);

VtcpStatus vtcp_instance_load(const char *path, VtcpInstance **out_instance);

/**
 * Instance of a registered worked example, such as `"4.1"`. Examples recorded without
 * vectors get `q1 = q2 = 0`.
 */
VtcpStatus vtcp_instance_example(const char *id, VtcpInstance **out_instance);

/**
 * Seeded random instance. `kind` is `"z-semipositive-pair"` or `"random-dense-pair"`.
 */
VtcpStatus vtcp_instance_generate(const char *kind,
                                  size_t order,
                                  size_t dim,
                                  uint64_t seed,
                                  VtcpInstance **out_instance);

VtcpStatus vtcp_instance_save(const VtcpInstance *instance, const char *path);

VtcpStatus vtcp_instance_to_json(const VtcpInstance *instance, char **out_json);

/**
 * Tensor order, or 0 for NULL.
 */
size_t vtcp_instance_order(const VtcpInstance *instance);

/**
 * Dimension, or 0 for NULL.
 */
size_t vtcp_instance_dim(const VtcpInstance *instance);

void vtcp_instance_free(VtcpInstance *instance);

/**
 * Writes `min(q1 + A1 x^(m-1), q2 + A2 x^(m-1))` into `out_residual`. Both buffers hold
 * `dim` values.
 */
VtcpStatus vtcp_residual(const VtcpInstance *instance, const double *x, double *out_residual);

/**
 * Checks feasibility, complementarity and the residual at `x` (length `dim`) within `tol`.
 */
VtcpStatus vtcp_verify(const VtcpInstance *instance, const double *x, double tol, bool *out_passed);

/**
 * Runs a solver. `method` is a [`VtcpMethod`] value. `x0` may be NULL and is only
 * accepted by Newton. `tol <= 0` and `max_iters == 0` select the defaults.
 */
VtcpStatus vtcp_solve(const VtcpInstance *instance,
                      int32_t method,
                      const double *x0,
                      double tol,
                      size_t max_iters,
                      uint64_t seed,
                      VtcpReport **out_report);

VtcpStatus vtcp_report_status(const VtcpReport *report, VtcpSolveStatus *out_status);

/**
 * Length of the final iterate, or 0 for NULL.
 */
size_t vtcp_report_dim(const VtcpReport *report);

/**
 * Copies the final iterate into `out_x`, which must hold at least `len` values.
 */
VtcpStatus vtcp_report_x(const VtcpReport *report, double *out_x, size_t len);

/**
 * Infinity norm of the residual at the final iterate, or NaN for NULL.
 */
double vtcp_report_residual(const VtcpReport *report);

size_t vtcp_report_iterations(const VtcpReport *report);

/**
 * Full report as JSON, including traces and oracle solutions.
 */
VtcpStatus vtcp_report_to_json(const VtcpReport *report, char **out_json);

void vtcp_report_free(VtcpReport *report);

/**
 * Class verdicts as a JSON array. `classes` is a comma-separated list such as
 * `"vp,vp1,z"`, or NULL for the pair classes. `starts == 0` selects the default.
 */
VtcpStatus vtcp_analyze_json(const VtcpInstance *instance,
                             const char *classes,
                             uint64_t seed,
                             size_t starts,
                             char **out_json);

/**
 * Re-checks the facts recorded for worked example `id`, or for every example when `id`
 * is NULL. Writes the reports as a JSON array and whether every fact held.
 */
VtcpStatus vtcp_reproduce_json(const char *id,
                               uint64_t seed,
                               size_t starts,
                               char **out_json,
                               bool *out_passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VTCP_H */
