#ifndef MECHANICS_H
#define MECHANICS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum MechStatus {
  MECH_STATUS_OK = 0,
  MECH_STATUS_NULL_POINTER = 1,
  MECH_STATUS_INVALID_UTF8 = 2,
  MECH_STATUS_PARSE_ERROR = 3,
  MECH_STATUS_DOMAIN_ERROR = 4,
  MECH_STATUS_DIMENSION_MISMATCH = 5,
  MECH_STATUS_SINGULAR_MASS_MATRIX = 6,
  MECH_STATUS_NO_CONVERGENCE = 7,
  MECH_STATUS_GRID_MISMATCH = 8,
  MECH_STATUS_BASE_MISMATCH = 9,
  MECH_STATUS_INVALID_ARGUMENT = 10,
  MECH_STATUS_PANIC = 11,
} MechStatus;

/**
 * Which equations [`mech_simulate`] integrates.
 */
typedef enum MechPicture {
  MECH_PICTURE_LAGRANGIAN = 0,
  MECH_PICTURE_HAMILTONIAN = 1,
} MechPicture;

/**
 * Trajectory columns for [`mech_trajectory_copy`].
 */
typedef enum MechField {
  MECH_FIELD_TIME = 0,
  MECH_FIELD_POSITION = 1,
  MECH_FIELD_VELOCITY = 2,
  MECH_FIELD_MOMENTUM = 3,
  MECH_FIELD_FORCE = 4,
} MechField;

/**
 * Opaque Lagrangian system with its force form and parameters.
 */
typedef struct MechSystem MechSystem;

/**
 * Opaque sampled trajectory.
 */
typedef struct MechTrajectory MechTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty after a
 * success. Valid until the next call into this library on the same thread.
 */
const char *mech_last_error(void);

/**
 * Parses a system `L(x, v)` with `n_rho` force components (0 or `dim`)
 * and `n_params` named parameters.
 *
 * # Safety
 * String arguments must be NUL-terminated; arrays must hold the stated
 * number of elements; `out` must be writable.
 */
enum MechStatus mech_system_new(size_t dim,
                                const char *lagrangian,
                                const char *const *rho,
                                size_t n_rho,
                                const char *const *param_names,
                                const double *param_values,
                                size_t n_params,
                                struct MechSystem **out);

/**
 * Releases a system. Null is ignored.
 *
 * # Safety
 * `sys` must come from [`mech_system_new`] and not be used afterwards.
 */
void mech_system_free(struct MechSystem *sys);

/**
 * Dimension of the configuration space; 0 for a null handle.
 *
 * # Safety
 * `sys` must be null or a live handle.
 */
size_t mech_system_dim(const struct MechSystem *sys);

/**
 * Momentum `p = ∂L/∂v(x, v)`.
 *
 * # Safety
 * Vector arguments must point to `dim` doubles.
 */
enum MechStatus mech_legendre(const struct MechSystem *sys,
                              const double *x,
                              const double *v,
                              double *p_out);

/**
 * Velocity with momentum `p` at `x`, by Newton iteration from zero.
 * `iterations_out` may be null.
 *
 * # Safety
 * Vector arguments must point to `dim` doubles.
 */
enum MechStatus mech_legendre_invert(const struct MechSystem *sys,
                                     const double *x,
                                     const double *p,
                                     double *v_out,
                                     size_t *iterations_out);

/**
 * External force needed for acceleration `a` at `(x, v)`.
 *
 * # Safety
 * Vector arguments must point to `dim` doubles.
 */
enum MechStatus mech_euler_lagrange(const struct MechSystem *sys,
                                    const double *x,
                                    const double *v,
                                    const double *a,
                                    double *f_out);

/**
 * Acceleration produced by force `f` at `(x, v)`.
 *
 * # Safety
 * Vector arguments must point to `dim` doubles.
 */
enum MechStatus mech_solve_accel(const struct MechSystem *sys,
                                 const double *x,
                                 const double *v,
                                 const double *f,
                                 double *a_out);

/**
 * Hamiltonian `H(x, p)`.
 *
 * # Safety
 * Vector arguments must point to `dim` doubles; `h_out` must be writable.
 */
enum MechStatus mech_hamiltonian(const struct MechSystem *sys,
                                 const double *x,
                                 const double *p,
                                 double *h_out);

/**
 * Integrates from `(x0, v0)` over `[t0, t1]` with step `dt`. `zeta` holds
 * `dim` force expressions in `t` (using the system parameters), or is null
 * for no external force.
 *
 * # Safety
 * Vector arguments must point to `dim` doubles; `zeta` must be null or
 * hold `dim` NUL-terminated strings; `out` must be writable.
 */
enum MechStatus mech_simulate(const struct MechSystem *sys,
                              const char *const *zeta,
                              const double *x0,
                              const double *v0,
                              double t0,
                              double t1,
                              double dt,
                              enum MechPicture picture,
                              struct MechTrajectory **out);

/**
 * Number of samples; 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t mech_trajectory_len(const struct MechTrajectory *traj);

/**
 * Copies one column into `buf`, row-major: `len` values for
 * `MECH_FIELD_TIME`, `len * dim` otherwise. `buf_len` is the capacity in
 * doubles.
 *
 * # Safety
 * `buf` must hold `buf_len` doubles.
 */
enum MechStatus mech_trajectory_copy(const struct MechTrajectory *traj,
                                     enum MechField field,
                                     double *buf,
                                     size_t buf_len);

/**
 * Releases a trajectory. Null is ignored.
 *
 * # Safety
 * `traj` must come from [`mech_simulate`] and not be used afterwards.
 */
void mech_trajectory_free(struct MechTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MECHANICS_H */
