#ifndef PEARCEY_H
#define PEARCEY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PearceyStatus {
  PEARCEY_STATUS_OK = 0,
  PEARCEY_STATUS_NULL_POINTER = 1,
  PEARCEY_STATUS_VALIDATION = 2,
  PEARCEY_STATUS_NUMERIC = 3,
  PEARCEY_STATUS_TURNING_POINT = 4,
  PEARCEY_STATUS_OUTSIDE_CHART = 5,
  PEARCEY_STATUS_BUFFER_TOO_SMALL = 6,
  PEARCEY_STATUS_PANIC = 7,
} PearceyStatus;

/**
 * WKB series table with f-coefficients.
 */
typedef struct PearceySeries PearceySeries;

/**
 * Result of a connection walk.
 */
typedef struct PearceyWalk PearceyWalk;

typedef struct PearceyComplex {
  double re;
  double im;
} PearceyComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; valid until the next call.
 */
const char *pearcey_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pearcey_version(void);

/**
 * Build the series table to truncation order `order` (at most 24).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum PearceyStatus pearcey_series_new(uint32_t order, struct PearceySeries **out);

/**
 * # Safety
 * `h` must come from [`pearcey_series_new`] and not be used afterwards.
 */
void pearcey_series_free(struct PearceySeries *h);

int32_t pearcey_series_order(const struct PearceySeries *h);

/**
 * Labelled ζ_ℓ and u_ℓ, ℓ = 1, 2, 3, at x.
 *
 * # Safety
 * `zeta` and `u` must each point to three writable elements.
 */
enum PearceyStatus pearcey_char_roots(struct PearceyComplex x1,
                                      struct PearceyComplex x2,
                                      struct PearceyComplex *zeta,
                                      struct PearceyComplex *u);

/**
 * Borel coefficients of ψ_ℓ: coefficient j multiplies (y − u_ℓ)^{j − 1/2}.
 * Writes min(cap, order + 1) values and the full count to `len`.
 *
 * # Safety
 * `out` must hold `cap` elements; `len` must be writable.
 */
enum PearceyStatus pearcey_borel_coeffs(const struct PearceySeries *h,
                                        struct PearceyComplex x1,
                                        struct PearceyComplex x2,
                                        uint32_t ell,
                                        struct PearceyComplex *out,
                                        size_t cap,
                                        size_t *len);

/**
 * ψ_{ℓ,B}(x, y) from the closed form; `validated` is set to 0 outside the
 * chart where the sheet labels were checked.
 *
 * # Safety
 * `out` and `validated` must be writable.
 */
enum PearceyStatus pearcey_psi_borel(uint32_t ell,
                                     struct PearceyComplex x1,
                                     struct PearceyComplex x2,
                                     struct PearceyComplex y,
                                     struct PearceyComplex *out,
                                     int32_t *validated);

/**
 * Δ_{u_k}ψ_ℓ / ψ_k (tilde = 0) or the tilde discontinuity ratio (tilde ≠ 0).
 *
 * # Safety
 * `ratio` must be writable.
 */
enum PearceyStatus pearcey_discontinuity(const struct PearceySeries *h,
                                         int32_t tilde,
                                         uint32_t ell,
                                         uint32_t k,
                                         struct PearceyComplex x1,
                                         struct PearceyComplex x2,
                                         struct PearceyComplex *ratio);

/**
 * ∫ exp(η(z⁴ + x₂z² + x₁z)) dz from valley `from` to valley `to`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PearceyStatus pearcey_quadrature(struct PearceyComplex x1,
                                      struct PearceyComplex x2,
                                      struct PearceyComplex eta,
                                      uint32_t from,
                                      uint32_t to,
                                      struct PearceyComplex *out);

/**
 * Connection walk along the built-in polyline x⁽¹⁾ … x⁽¹³⁾.
 *
 * # Safety
 * `out` must be writable.
 */
enum PearceyStatus pearcey_connect_polyline(const struct PearceySeries *h,
                                            uint32_t samples,
                                            struct PearceyWalk **out);

size_t pearcey_walk_len(const struct PearceyWalk *w);

/**
 * Row-major 3×3 matrix of step `i` (Ψ^{before} = C Ψ^{after}), plus the
 * crossing's path parameter.
 *
 * # Safety
 * `entries` must hold nine elements; `param` must be writable.
 */
enum PearceyStatus pearcey_walk_matrix(const struct PearceyWalk *w,
                                       size_t i,
                                       int64_t *entries,
                                       double *param);

/**
 * # Safety
 * `w` must come from [`pearcey_connect_polyline`] and not be used afterwards.
 */
void pearcey_walk_free(struct PearceyWalk *w);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PEARCEY_H */
