#ifndef CWLAB_H
#define CWLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CwlabStatus {
  CWLAB_STATUS_OK = 0,
  CWLAB_STATUS_NULL_POINTER = 1,
  CWLAB_STATUS_INVALID_PARAMETER = 2,
  CWLAB_STATUS_NO_POSITIVE_ROOT = 3,
  CWLAB_STATUS_OUTSIDE_REGIME = 4,
  CWLAB_STATUS_REDUCIBLE = 5,
  CWLAB_STATUS_NOT_REVERSIBLE = 6,
  CWLAB_STATUS_NUMERIC_OVERFLOW = 7,
  CWLAB_STATUS_NEED_LARGER_HORIZON = 8,
  CWLAB_STATUS_BUFFER_TOO_SMALL = 9,
  CWLAB_STATUS_NUMERIC_FAILURE = 10,
  CWLAB_STATUS_PANIC = 11,
} CwlabStatus;

/**
 * Starting state selector for [`cwlab_tmix`].
 */
typedef enum CwlabStart {
  CWLAB_START_BOTTOM = 0,
  CWLAB_START_TOP = 1,
  /**
   * Use the accompanying magnetization value.
   */
  CWLAB_START_VALUE = 2,
} CwlabStart;

/**
 * Magnetization birth-and-death kernel.
 */
typedef struct CwlabKernel CwlabKernel;

/**
 * Spin dynamics with its own random stream.
 */
typedef struct CwlabSimulator CwlabSimulator;

typedef struct CwlabGap {
  double gap;
  double lambda2;
  double lambda_min;
  double dirichlet_bound;
} CwlabGap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL,
 * or 0 if there is none.
 *
 * # Safety
 * `buf` must be null or valid for `len` writable bytes.
 */
size_t cwlab_last_error_message(char *buf, size_t len);

/**
 * Positive root of `tanh(beta x) = x`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum CwlabStatus cwlab_zeta(double beta, double *out);

/**
 * Builds the magnetization kernel on `n` spins.
 *
 * # Safety
 * `out` must be valid for one write. The handle written there is owned by
 * the caller.
 */
enum CwlabStatus cwlab_kernel_new(size_t n, double beta, bool censored, struct CwlabKernel **out);

/**
 * # Safety
 * `kernel` must be null or a handle from [`cwlab_kernel_new`] not yet freed.
 */
void cwlab_kernel_free(struct CwlabKernel *kernel);

/**
 * Number of lattice states, or 0 for a null handle.
 *
 * # Safety
 * `kernel` must be null or a live handle.
 */
size_t cwlab_kernel_len(const struct CwlabKernel *kernel);

/**
 * Writes the up, down and hold probabilities of every state; each buffer
 * needs [`cwlab_kernel_len`] entries.
 *
 * # Safety
 * `kernel` must be a live handle and each buffer valid for `len` writes.
 */
enum CwlabStatus cwlab_kernel_rows(const struct CwlabKernel *kernel,
                                   double *up,
                                   double *down,
                                   double *hold,
                                   size_t len);

/**
 * Stationary law into `out` (`len` at least [`cwlab_kernel_len`]).
 *
 * # Safety
 * `kernel` must be a live handle and `out` valid for `len` writes.
 */
enum CwlabStatus cwlab_kernel_stationary(const struct CwlabKernel *kernel, double *out, size_t len);

/**
 * # Safety
 * `kernel` must be a live handle and `out` valid for one write.
 */
enum CwlabStatus cwlab_kernel_gap(const struct CwlabKernel *kernel, struct CwlabGap *out);

/**
 * Bottleneck ratio of the kernel.
 *
 * # Safety
 * `kernel` must be a live handle and `out` valid for one write.
 */
enum CwlabStatus cwlab_kernel_phi_star(const struct CwlabKernel *kernel, double *out);

/**
 * Exact mixing time `t_mix(epsilon)` of the kernel's chain from one start.
 * `value` is read only for [`CwlabStart::Value`].
 *
 * # Safety
 * `kernel` must be a live handle and `out` valid for one write.
 */
enum CwlabStatus cwlab_tmix(const struct CwlabKernel *kernel,
                            enum CwlabStart start,
                            double value,
                            double epsilon,
                            uint64_t *out);

/**
 * Spin dynamics on `n` spins started at magnetization `s0` (rounded up to
 * the lattice), driven by replica `replica` of `seed`.
 *
 * # Safety
 * `out` must be valid for one write. The handle is owned by the caller.
 */
enum CwlabStatus cwlab_simulator_new(size_t n,
                                     double beta,
                                     bool censored,
                                     double s0,
                                     uint64_t seed,
                                     uint64_t replica,
                                     struct CwlabSimulator **out);

/**
 * # Safety
 * `sim` must be null or a handle from [`cwlab_simulator_new`] not yet freed.
 */
void cwlab_simulator_free(struct CwlabSimulator *sim);

/**
 * Advances the dynamics by `steps` single-site updates.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum CwlabStatus cwlab_simulator_step(struct CwlabSimulator *sim, uint64_t steps);

/**
 * Current magnetization, or NaN for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
double cwlab_simulator_magnetization(const struct CwlabSimulator *sim);

/**
 * Updates performed so far, or 0 for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
uint64_t cwlab_simulator_steps(const struct CwlabSimulator *sim);

/**
 * Copies the current spins (+1 or -1) into `out`.
 *
 * # Safety
 * `sim` must be a live handle and `out` valid for `len` writes.
 */
enum CwlabStatus cwlab_simulator_spins(const struct CwlabSimulator *sim, int8_t *out, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CWLAB_H */
