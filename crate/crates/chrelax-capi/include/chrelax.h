/* C interface to the chrelax solver. Generated by cbindgen; do not edit. */

#ifndef CHRELAX_H
#define CHRELAX_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a C API call. Zero is success; anything else is an error whose
 * message is available from `chrelax_last_error`.
 */
typedef enum {
  CHRELAX_STATUS_OK = 0,
  CHRELAX_STATUS_NULL_ARGUMENT = 1,
  CHRELAX_STATUS_INVALID_UTF8 = 2,
  CHRELAX_STATUS_INVALID_PARAMETER = 3,
  CHRELAX_STATUS_INVALID_CONFIG = 4,
  CHRELAX_STATUS_DOMAIN_MISMATCH = 5,
  CHRELAX_STATUS_GUARD_VIOLATION = 6,
  CHRELAX_STATUS_OVERFLOW = 7,
  CHRELAX_STATUS_IO = 8,
  CHRELAX_STATUS_MALFORMED_ARTIFACT = 9,
  CHRELAX_STATUS_BUFFER_TOO_SMALL = 10,
  CHRELAX_STATUS_INDEX_OUT_OF_RANGE = 11,
  CHRELAX_STATUS_PANIC = 12,
} ChrelaxStatus;

/**
 * Opaque parsed and validated experiment configuration.
 */
typedef struct ChrelaxConfig ChrelaxConfig;

/**
 * Opaque result of a relaxation sweep.
 */
typedef struct ChrelaxSweep ChrelaxSweep;

/**
 * Opaque sampled trajectory of one run.
 */
typedef struct ChrelaxTrajectory ChrelaxTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *chrelax_version(void);

/**
 * Message of the most recent failure on this thread, or null after a
 * success. The pointer is valid until the next failing call on the thread.
 */
const char *chrelax_last_error(void);

/**
 * Parse and validate a TOML configuration from memory.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
ChrelaxStatus chrelax_config_from_toml(const char *text, ChrelaxConfig **out);

/**
 * Parse and validate a TOML configuration from a file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
ChrelaxStatus chrelax_config_from_file(const char *path, ChrelaxConfig **out);

/**
 * Write the configuration's canonical hash (64 hex digits plus NUL) into
 * `buf`; `len` must be at least 65.
 *
 * # Safety
 * `config` must be a live handle and `buf` writable for `len` bytes.
 */
ChrelaxStatus chrelax_config_hash(const ChrelaxConfig *config, char *buf, size_t len);

/**
 * Release a configuration handle (null is allowed).
 *
 * # Safety
 * `config` must be null or a handle not yet freed.
 */
void chrelax_config_free(ChrelaxConfig *config);

/**
 * Run the configured simulation and return a trajectory handle.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
ChrelaxStatus chrelax_simulate(const ChrelaxConfig *config, ChrelaxTrajectory **out);

/**
 * Run the configured simulation and write its artifacts into `dir`.
 *
 * # Safety
 * `config` must be a live handle and `dir` a valid NUL-terminated string.
 */
ChrelaxStatus chrelax_simulate_to_dir(const ChrelaxConfig *config, const char *dir);

/**
 * Number of saved samples.
 *
 * # Safety
 * `traj` must be a live handle.
 */
size_t chrelax_trajectory_len(const ChrelaxTrajectory *traj);

/**
 * Number of coefficients per saved state.
 *
 * # Safety
 * `traj` must be a live handle.
 */
size_t chrelax_trajectory_coeff_count(const ChrelaxTrajectory *traj);

/**
 * Time of sample `i`.
 *
 * # Safety
 * `traj` must be a live handle and `out` a valid pointer.
 */
ChrelaxStatus chrelax_trajectory_time(const ChrelaxTrajectory *traj, size_t i, double *out);

/**
 * Copy the coefficients of sample `i` into `buf` (length from
 * `chrelax_trajectory_coeff_count`).
 *
 * # Safety
 * `traj` must be a live handle and `buf` writable for `len` doubles.
 */
ChrelaxStatus chrelax_trajectory_state(const ChrelaxTrajectory *traj,
                                       size_t i,
                                       double *buf,
                                       size_t len);

/**
 * Copy the velocity coefficients of sample `i` into `buf`; fails for runs
 * without a velocity (tau = 0).
 *
 * # Safety
 * `traj` must be a live handle and `buf` writable for `len` doubles.
 */
ChrelaxStatus chrelax_trajectory_velocity(const ChrelaxTrajectory *traj,
                                          size_t i,
                                          double *buf,
                                          size_t len);

/**
 * Total energy recorded at sample `i`.
 *
 * # Safety
 * `traj` must be a live handle and `out` a valid pointer.
 */
ChrelaxStatus chrelax_trajectory_energy(const ChrelaxTrajectory *traj, size_t i, double *out);

/**
 * Release a trajectory handle (null is allowed).
 *
 * # Safety
 * `traj` must be null or a handle not yet freed.
 */
void chrelax_trajectory_free(ChrelaxTrajectory *traj);

/**
 * Run the configured relaxation sweep with `jobs` worker threads and return
 * a sweep handle.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
ChrelaxStatus chrelax_sweep_run(const ChrelaxConfig *config, size_t jobs, ChrelaxSweep **out);

/**
 * Run the configured sweep and write its artifacts into `dir`.
 *
 * # Safety
 * `config` must be a live handle and `dir` a valid NUL-terminated string.
 */
ChrelaxStatus chrelax_sweep_to_dir(const ChrelaxConfig *config, size_t jobs, const char *dir);

/**
 * Number of tau values measured by the sweep.
 *
 * # Safety
 * `sweep` must be a live handle.
 */
size_t chrelax_sweep_count(const ChrelaxSweep *sweep);

/**
 * Copy row `i` of the sweep error table: tau plus the four error norms in
 * file order (c0_vstar, l2_w, l2_wstar_mu, l2_h_w).
 *
 * # Safety
 * `sweep` must be a live handle; `out_tau` and `out_errors` (4 doubles)
 * must be writable.
 */
ChrelaxStatus chrelax_sweep_error_row(const ChrelaxSweep *sweep,
                                      size_t i,
                                      double *out_tau,
                                      double *out_errors);

/**
 * Fitted decay rate of one error norm (name as in the error table header).
 *
 * # Safety
 * `sweep` must be a live handle, `name` a valid NUL-terminated string, and
 * the out pointers writable.
 */
ChrelaxStatus chrelax_sweep_rate(const ChrelaxSweep *sweep,
                                 const char *name,
                                 double *out_slope,
                                 double *out_r_squared);

/**
 * Release a sweep handle (null is allowed).
 *
 * # Safety
 * `sweep` must be null or a handle not yet freed.
 */
void chrelax_sweep_free(ChrelaxSweep *sweep);

/**
 * Run the built-in verification checks. `filter` (nullable) selects checks
 * by substring; a nonzero `inject_neumann_sign` flips the sign of the
 * zero-mean inverse Laplacian to prove the checks catch it. Writes the
 * number of checks run and the number failed.
 *
 * # Safety
 * `filter` must be null or a valid NUL-terminated string; the out pointers
 * must be writable.
 */
ChrelaxStatus chrelax_verify_run(const char *filter,
                                 int32_t inject_neumann_sign,
                                 size_t *out_total,
                                 size_t *out_failed);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CHRELAX_H */
