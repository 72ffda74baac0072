#ifndef QUBIT_NOISE_H
#define QUBIT_NOISE_H

/* Generated by cbindgen from the qubit-noise-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call. Mirrors the library error classes; `QnPanic` reports
 * an internal invariant failure that was contained at the boundary.
 */
typedef enum QnStatus {
  QN_OK = 0,
  QN_NULL_POINTER = 1,
  QN_CONFIG = 2,
  QN_CONVERGENCE = 3,
  QN_DOMAIN = 4,
  QN_FIT = 5,
  QN_PANIC = 6,
} QnStatus;

/**
 * Probability density of one noise coordinate (opaque).
 */
typedef struct QnDensity QnDensity;

/**
 * Energy gap plus coupling and detuning densities (opaque).
 */
typedef struct QnModel QnModel;

/**
 * A qubit density matrix in the energy basis; the off-diagonal entry is
 * `re_rho12 + i im_rho12` and `rho22 = 1 - rho11` is implicit.
 */
typedef struct QnState {
  double rho11;
  double re_rho12;
  double im_rho12;
} QnState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * `(1 - (u/half_width)^2)^n` bump on `[-half_width, half_width]`, normalized.
 *
 * # Safety
 * `out` must be valid for a single pointer write.
 */
enum QnStatus qn_density_poly_bump(uint32_t n, double half_width, struct QnDensity **out);

/**
 * Infinitely differentiable bump `exp(-1/(1 - (u/half_width)^2))`, normalized.
 *
 * # Safety
 * `out` must be valid for a single pointer write.
 */
enum QnStatus qn_density_smooth_bump(double half_width, struct QnDensity **out);

/**
 * Polynomial bump multiplied by `|u|^k`, vanishing to order `k` at zero.
 *
 * # Safety
 * `out` must be valid for a single pointer write.
 */
enum QnStatus qn_density_ir_poly_bump(uint32_t k,
                                      uint32_t n,
                                      double half_width,
                                      struct QnDensity **out);

/**
 * Polynomial bump of the given width centered at `center > width`.
 *
 * # Safety
 * `out` must be valid for a single pointer write.
 */
enum QnStatus qn_density_shifted_bump(double center,
                                      double width,
                                      uint32_t n,
                                      struct QnDensity **out);

/**
 * Even pair of polynomial bumps centered at `+-center`.
 *
 * # Safety
 * `out` must be valid for a single pointer write.
 */
enum QnStatus qn_density_mirrored_bump(double center,
                                       double width,
                                       uint32_t n,
                                       struct QnDensity **out);

/**
 * Point mass at zero (coordinate switched off).
 *
 * # Safety
 * `out` must be valid for a single pointer write.
 */
enum QnStatus qn_density_zero(struct QnDensity **out);

/**
 * Releases a density handle. Null is a no-op.
 *
 * # Safety
 * `d` must be a handle from a `qn_density_*` constructor, not yet freed.
 */
void qn_density_free(struct QnDensity *d);

/**
 * Evaluates the probability density at `u`.
 *
 * # Safety
 * `d` must be a live density handle; `out` must be valid for a write.
 */
enum QnStatus qn_density_pdf(const struct QnDensity *d, double u, double *out);

/**
 * Characteristic function `E[exp(-i t u)]` split into real and imaginary parts.
 *
 * # Safety
 * `d` must be a live density handle; `out_re` and `out_im` must be valid for writes.
 */
enum QnStatus qn_density_fourier(const struct QnDensity *d,
                                 double t,
                                 double *out_re,
                                 double *out_im);

/**
 * Draws `count` i.i.d. samples into `buf`. Deterministic in `seed`.
 *
 * # Safety
 * `d` must be a live density handle; `buf` must be valid for `count` writes.
 */
enum QnStatus qn_density_sample(const struct QnDensity *d,
                                uint64_t seed,
                                double *buf,
                                size_t count);

/**
 * Builds a noise model from the gap `eps` and the coupling and detuning
 * densities. The densities are copied; the caller keeps ownership of them.
 * Fails with `QnDomain` if the detuning support reaches `-eps`.
 *
 * # Safety
 * `mu_o` and `mu_d` must be live density handles; `out` must be valid for a
 * single pointer write.
 */
enum QnStatus qn_model_new(double eps,
                           const struct QnDensity *mu_o,
                           const struct QnDensity *mu_d,
                           struct QnModel **out);

/**
 * Releases a model handle. Null is a no-op.
 *
 * # Safety
 * `m` must be a handle from `qn_model_new`, not yet freed.
 */
void qn_model_free(struct QnModel *m);

/**
 * Evolves `rho0` for time `t` under one frozen noise realization
 * `(x, y)` drawn around the gap `eps`, using the closed form.
 *
 * # Safety
 * `rho0` must be valid for a read and `out` for a write.
 */
enum QnStatus qn_rho_t(double eps,
                       double x,
                       double y,
                       const struct QnState *rho0,
                       double t,
                       struct QnState *out);

/**
 * Noise-averaged state at time `t` by adaptive quadrature at the default
 * tolerances. `out_rho11_err` and `out_rho12_err` receive error estimates
 * and may be null if not wanted.
 *
 * # Safety
 * `m` must be a live model handle, `rho0` valid for a read, `out` for a
 * write, and each non-null error pointer valid for a write.
 */
enum QnStatus qn_expected_rho(const struct QnModel *m,
                              const struct QnState *rho0,
                              double t,
                              struct QnState *out,
                              double *out_rho11_err,
                              double *out_rho12_err);

/**
 * Coefficients of the affine long-time map: the time-averaged population is
 * `alpha + beta rho11 - 2 gamma re_rho12` and the residual coherence is real.
 * `out_err` receives a coefficient error estimate and may be null.
 *
 * # Safety
 * `m` must be a live model handle; `out_alpha`, `out_beta`, `out_gamma`
 * must be valid for writes, and `out_err` too when non-null.
 */
enum QnStatus qn_final_state_coeffs(const struct QnModel *m,
                                    double *out_alpha,
                                    double *out_beta,
                                    double *out_gamma,
                                    double *out_err);

/**
 * Applies the long-time map to an initial state without averaging again.
 *
 * # Safety
 * `rho0` must be valid for a read and `out` for a write.
 */
enum QnStatus qn_final_state(double alpha,
                             double beta,
                             double gamma,
                             const struct QnState *rho0,
                             struct QnState *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUBIT_NOISE_H */
