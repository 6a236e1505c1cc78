#ifndef POLYHOM_H
#define POLYHOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PhStatus {
  PH_STATUS_OK = 0,
  PH_STATUS_NULL_POINTER = 1,
  PH_STATUS_INVALID_UTF8 = 2,
  PH_STATUS_PARSE = 3,
  PH_STATUS_INVALID_INPUT = 4,
  PH_STATUS_SHAPE = 5,
  PH_STATUS_NUMERICAL = 6,
  PH_STATUS_OUT_OF_RANGE = 7,
  PH_STATUS_PANIC = 8,
} PhStatus;

typedef enum PhStart {
  /**
   * Single well-conditioned start zero.
   */
  PH_START_SHSM = 0,
  /**
   * Roots-of-unity start system with all Bézout-many zeros.
   */
  PH_START_BC = 1,
  /**
   * Random start pair drawn from the seed.
   */
  PH_START_BP = 2,
} PhStart;

typedef enum PhPathStatus {
  PH_PATH_STATUS_SUCCESS = 0,
  PH_PATH_STATUS_STEP_LIMIT = 1,
  PH_PATH_STATUS_SINGULAR_ENCOUNTER = 2,
  PH_PATH_STATUS_UNCERTIFIED = 3,
} PhPathStatus;

/**
 * Opaque set of tracked paths.
 */
typedef struct PhSolution PhSolution;

/**
 * Opaque polynomial system.
 */
typedef struct PhSystem PhSystem;

/**
 * Summary of one tracked path.
 */
typedef struct PhPathInfo {
  enum PhPathStatus status;
  bool certified;
  double mu;
  double residual;
  size_t steps;
  size_t rejections;
} PhPathInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ph_version(void);

/**
 * Message for the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *ph_last_error_message(void);

/**
 * Parse a system from its JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum PhStatus ph_system_from_json(const char *json, struct PhSystem **out);

/**
 * # Safety
 * `sys` must come from [`ph_system_from_json`] and not be used afterwards.
 */
void ph_system_free(struct PhSystem *sys);

/**
 * Number of equations `n`; the system has `n + 1` homogeneous variables.
 *
 * # Safety
 * `sys` must be a live handle or null (which yields 0).
 */
size_t ph_system_n(const struct PhSystem *sys);

/**
 * Bombieri–Weyl norm of the system.
 *
 * # Safety
 * `sys` must be a live handle and `out` writable.
 */
enum PhStatus ph_system_bw_norm(const struct PhSystem *sys, double *out);

/**
 * Evaluate the system at a homogeneous point of length `n + 1`, writing `n`
 * values.
 *
 * # Safety
 * Input arrays must hold `len` doubles and output arrays `n` doubles.
 */
enum PhStatus ph_system_evaluate(const struct PhSystem *sys,
                                 const double *re,
                                 const double *im,
                                 size_t len,
                                 double *out_re,
                                 double *out_im);

/**
 * Condition number `μ(h, z)` at a homogeneous point (infinite on the
 * singular locus).
 *
 * # Safety
 * Input arrays must hold `len` doubles and `out` be writable.
 */
enum PhStatus ph_mu(const struct PhSystem *sys,
                    const double *re,
                    const double *im,
                    size_t len,
                    double *out);

/**
 * Track from the chosen start system to `sys` along the great circle.
 * With `all` set every start zero is followed (only valid for
 * [`PhStart::Bc`]); otherwise only the first. `seed` matters for
 * [`PhStart::Bp`] only.
 *
 * # Safety
 * `sys` must be a live handle and `out` writable.
 */
enum PhStatus ph_solve(const struct PhSystem *sys,
                       enum PhStart start,
                       bool all,
                       uint64_t seed,
                       struct PhSolution **out);

/**
 * # Safety
 * `sol` must come from [`ph_solve`] and not be used afterwards.
 */
void ph_solution_free(struct PhSolution *sol);

/**
 * Number of tracked paths.
 *
 * # Safety
 * `sol` must be a live handle or null (which yields 0).
 */
size_t ph_solution_len(const struct PhSolution *sol);

/**
 * Status and diagnostics of path `i`.
 *
 * # Safety
 * `sol` must be a live handle and `out` writable.
 */
enum PhStatus ph_solution_path(const struct PhSolution *sol, size_t i, struct PhPathInfo *out);

/**
 * Unit homogeneous endpoint of path `i` (`n + 1` coordinates).
 *
 * # Safety
 * Output arrays must hold `len` doubles.
 */
enum PhStatus ph_solution_point(const struct PhSolution *sol,
                                size_t i,
                                double *re,
                                double *im,
                                size_t len);

/**
 * Affine coordinates `z_i / z_0` of the endpoint of path `i` (`n` values);
 * fails with [`PhStatus::Numerical`] for zeros at infinity.
 *
 * # Safety
 * Output arrays must hold `len` doubles.
 */
enum PhStatus ph_solution_affine(const struct PhSolution *sol,
                                 size_t i,
                                 double *re,
                                 double *im,
                                 size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYHOM_H */
