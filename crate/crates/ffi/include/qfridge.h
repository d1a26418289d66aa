#ifndef QFRIDGE_H
#define QFRIDGE_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum QfStatus {
  QF_STATUS_OK = 0,
  QF_STATUS_NULL_POINTER = 1,
  QF_STATUS_INVALID_ARGUMENT = 2,
  QF_STATUS_CONFIG = 3,
  QF_STATUS_PROPAGATION = 4,
  /**
   * The requested temperature is undefined (population inversion).
   */
  QF_STATUS_UNDEFINED = 5,
  QF_STATUS_PANIC = 6,
} QfStatus;

/**
 * Cold-qubit and per-qubit temperature series of a preset run.
 */
typedef struct QfTrajectory QfTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Runs a catalog preset. `overrides` holds `n_overrides` strings of the form
 * `path=value` and may be null when `n_overrides` is 0. On success `*out`
 * owns a trajectory that must be released with [`qf_trajectory_free`].
 *
 * # Safety
 * `name` must be a NUL-terminated string, `overrides` must point to
 * `n_overrides` such strings and `out` must be writable.
 */
enum QfStatus qf_run_preset(const char *name,
                            const char *const *overrides,
                            size_t n_overrides,
                            struct QfTrajectory **out);

/**
 * Number of samples; 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle from [`qf_run_preset`].
 */
size_t qf_trajectory_len(const struct QfTrajectory *traj);

/**
 * Number of system qubits; 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle from [`qf_run_preset`].
 */
size_t qf_trajectory_qubits(const struct QfTrajectory *traj);

/**
 * Reads sample `index` of `qubit`. The temperature is NaN where undefined.
 * Any of the output pointers may be null.
 *
 * # Safety
 * `traj` must be a live handle; non-null outputs must be writable.
 */
enum QfStatus qf_trajectory_sample(const struct QfTrajectory *traj,
                                   size_t index,
                                   size_t qubit,
                                   double *t,
                                   double *r_excited,
                                   double *temperature);

/**
 * Releases a trajectory. Null is ignored.
 *
 * # Safety
 * `traj` must be null or a handle from [`qf_run_preset`] not yet freed.
 */
void qf_trajectory_free(struct QfTrajectory *traj);

/**
 * Ohmic bath rate for signed transition frequency `freq`: emission for
 * `freq > 0`, absorption for `freq < 0`. At `freq == 0` the finite Ohmic
 * limit `alpha * tau` is returned.
 *
 * # Safety
 * `out` must be writable.
 */
enum QfStatus qf_decay_rate(double freq, double alpha, double omega_cut, double tau, double *out);

/**
 * Local temperature of a diagonal single-qubit state (8 doubles) with level
 * splitting `energy`. Returns [`QfStatus::Undefined`] under population
 * inversion.
 *
 * # Safety
 * `rho` must point to 8 doubles and `out` must be writable.
 */
enum QfStatus qf_local_temperature(const double *rho, double energy, double *out);

/**
 * Closed-form cold-qubit temperature of a single qubit exchanging with one
 * environment spin.
 */
double qf_analytic_single_qubit_temperature(double t, double e1, double tau1);

/**
 * Wootters concurrence of a two-qubit state (32 doubles).
 *
 * # Safety
 * `rho` must point to 32 doubles and `out` must be writable.
 */
enum QfStatus qf_concurrence(const double *rho, double *out);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL, so
 * a call with `len == 0` sizes the buffer.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t qf_last_error(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFRIDGE_H */
