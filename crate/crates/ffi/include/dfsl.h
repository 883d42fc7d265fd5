#ifndef DFSL_H
#define DFSL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum DfslStatus {
  DFSL_STATUS_OK = 0,
  DFSL_STATUS_NULL_POINTER = 1,
  DFSL_STATUS_INVALID_ARGUMENT = 2,
  DFSL_STATUS_INVALID_ORDER = 3,
  DFSL_STATUS_INVALID_GRID = 4,
  DFSL_STATUS_NON_POSITIVE = 5,
  DFSL_STATUS_SIZE_OVERFLOW = 6,
  DFSL_STATUS_IRRATIONAL_SCALE = 7,
  DFSL_STATUS_NO_CONVERGENCE = 8,
  DFSL_STATUS_TRIVIAL_SOLUTION = 9,
  DFSL_STATUS_HYPOTHESIS_UNMET = 10,
  DFSL_STATUS_BUFFER_TOO_SMALL = 11,
  DFSL_STATUS_CONFIG = 12,
  DFSL_STATUS_PANIC = 13,
} DfslStatus;

typedef enum DfslKernel {
  DFSL_KERNEL_RL_SUM = 0,
  DFSL_KERNEL_RL_DIFF = 1,
  DFSL_KERNEL_GL = 2,
} DfslKernel;

typedef enum DfslOperatorKind {
  DFSL_OPERATOR_KIND_NABLA_LEFT_SUM = 0,
  DFSL_OPERATOR_KIND_NABLA_RIGHT_SUM = 1,
  DFSL_OPERATOR_KIND_NABLA_LEFT_DIFF = 2,
  DFSL_OPERATOR_KIND_NABLA_RIGHT_DIFF = 3,
  DFSL_OPERATOR_KIND_DELTA_LEFT_DIFF = 4,
  DFSL_OPERATOR_KIND_DELTA_RIGHT_DIFF = 5,
} DfslOperatorKind;

typedef enum DfslVariant {
  DFSL_VARIANT_RL = 0,
  DFSL_VARIANT_GL = 1,
} DfslVariant;

typedef enum DfslVerdict {
  DFSL_VERDICT_HOLDS = 0,
  DFSL_VERDICT_VACUOUSLY_HOLDS = 1,
  DFSL_VERDICT_VIOLATED = 2,
} DfslVerdict;

/**
 * Eigenpairs of `L u = λ r u`, ascending.
 */
typedef struct DfslEigenSystem DfslEigenSystem;

/**
 * Assembled operator `L` on the `f64` backend.
 */
typedef struct DfslOperator DfslOperator;

/**
 * Grid `{a, a+h, ..., b}` with `h = h_num / h_den`; the interior has
 * `(b - a) - 1` points.
 */
typedef struct DfslGrid {
  int64_t a;
  int64_t b;
  int64_t h_num;
  int64_t h_den;
} DfslGrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *dfsl_version(void);

/**
 * Message of the last failed call on this thread (empty if none). The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *dfsl_last_error(void);

/**
 * Writes the first `len` kernel coefficients for order `mu_num / mu_den`.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum DfslStatus dfsl_kernel(enum DfslKernel kind,
                            int64_t mu_num,
                            int64_t mu_den,
                            size_t len,
                            double *out);

/**
 * Writes the `n × n` operator matrix row-major, `n` the interior size.
 *
 * # Safety
 * `out` must point to `out_len` writable doubles.
 */
enum DfslStatus dfsl_operator_matrix(enum DfslOperatorKind kind,
                                     int64_t mu_num,
                                     int64_t mu_den,
                                     struct DfslGrid grid_spec,
                                     double *out,
                                     size_t out_len);

/**
 * Assembles `L = M_left · diag(p) · M_right + diag(q)`; `p` and `q` hold
 * `n` interior values each.
 *
 * # Safety
 * `p` and `q` must point to `n` readable doubles; `out` must be writable.
 */
enum DfslStatus dfsl_assemble(enum DfslVariant variant,
                              int64_t mu_num,
                              int64_t mu_den,
                              struct DfslGrid grid_spec,
                              const double *p,
                              const double *q,
                              size_t n,
                              struct DfslOperator **out);

/**
 * Interior size of an operator, or 0 for a null handle.
 *
 * # Safety
 * `op` must be null or a live handle from [`dfsl_assemble`].
 */
size_t dfsl_operator_dim(const struct DfslOperator *op);

/**
 * Copies the assembled matrix row-major.
 *
 * # Safety
 * `op` must be a live handle; `out` must point to `out_len` writable doubles.
 */
enum DfslStatus dfsl_operator_entries(const struct DfslOperator *op, double *out, size_t out_len);

/**
 * # Safety
 * `op` must be null or a live handle; it is invalid afterwards.
 */
void dfsl_operator_free(struct DfslOperator *op);

/**
 * Solves `L u = λ r u`. A nonpositive `tol` selects the default.
 *
 * # Safety
 * `op` must be a live handle, `r` must point to `n` readable doubles and
 * `out` must be writable.
 */
enum DfslStatus dfsl_eigensolve(const struct DfslOperator *op,
                                const double *r,
                                size_t n,
                                double tol,
                                struct DfslEigenSystem **out);

/**
 * Number of eigenpairs, or 0 for a null handle.
 *
 * # Safety
 * `sys` must be null or a live handle from [`dfsl_eigensolve`].
 */
size_t dfsl_eigen_dim(const struct DfslEigenSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle; `out` must point to `out_len` writable doubles.
 */
enum DfslStatus dfsl_eigen_values(const struct DfslEigenSystem *sys, double *out, size_t out_len);

/**
 * Residuals `‖L u − λ r u‖₂`, one per eigenpair.
 *
 * # Safety
 * `sys` must be a live handle; `out` must point to `out_len` writable doubles.
 */
enum DfslStatus dfsl_eigen_residuals(const struct DfslEigenSystem *sys,
                                     double *out,
                                     size_t out_len);

/**
 * Eigenvector `k` (0-based), r-normalized.
 *
 * # Safety
 * `sys` must be a live handle; `out` must point to `out_len` writable doubles.
 */
enum DfslStatus dfsl_eigen_vector(const struct DfslEigenSystem *sys,
                                  size_t k,
                                  double *out,
                                  size_t out_len);

/**
 * # Safety
 * `sys` must be null or a live handle; it is invalid afterwards.
 */
void dfsl_eigen_free(struct DfslEigenSystem *sys);

/**
 * Generalized zeros of `values` (interior points `1..=n` of a unit grid)
 * as positions: an integer for a vanishing point, a half-integer for a sign
 * change. `count` receives the number found, also when the buffer is short.
 *
 * # Safety
 * `values` must point to `n` readable doubles, `out` to `cap` writable
 * doubles, and `count` must be writable.
 */
enum DfslStatus dfsl_find_zeros(const double *values,
                                size_t n,
                                double tol,
                                double *out,
                                size_t cap,
                                size_t *count);

/**
 * Interlacing check: a zero of `v` strictly between consecutive zeros of `u`.
 * Zero sets are strictly increasing position arrays.
 *
 * # Safety
 * `zu`/`zv` must point to `nu`/`nv` readable doubles; `out` must be writable.
 */
enum DfslStatus dfsl_check_first(const double *zu,
                                 size_t nu,
                                 const double *zv,
                                 size_t nv,
                                 enum DfslVerdict *out);

/**
 * Count and ordering check: `v` has at least as many zeros as `u` and each
 * `k`-th zero of `v` lies strictly left of the `k`-th zero of `u`.
 *
 * # Safety
 * `zu`/`zv` must point to `nu`/`nv` readable doubles; `out` must be writable.
 */
enum DfslStatus dfsl_check_second(const double *zu,
                                  size_t nu,
                                  const double *zv,
                                  size_t nv,
                                  enum DfslVerdict *out);

/**
 * Runs a comparison described by a TOML config (the `compare` grammar of
 * the `dfsl` CLI) and returns the JSON report; free it with
 * [`dfsl_string_free`].
 *
 * # Safety
 * `config` must be a NUL-terminated string; `out` must be writable.
 */
enum DfslStatus dfsl_compare_toml(const char *config, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library; it is invalid afterwards.
 */
void dfsl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DFSL_H */
