#ifndef FRACDYN_H
#define FRACDYN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum FracdynStatus {
  FRACDYN_STATUS_OK = 0,
  FRACDYN_STATUS_NULL_POINTER = 1,
  FRACDYN_STATUS_INVALID_UTF8 = 2,
  FRACDYN_STATUS_DOMAIN = 3,
  FRACDYN_STATUS_VALIDATION = 4,
  FRACDYN_STATUS_ACCURACY = 5,
  FRACDYN_STATUS_INSTABILITY = 6,
  FRACDYN_STATUS_ILL_CONDITIONED = 7,
  FRACDYN_STATUS_ESTIMATION = 8,
  FRACDYN_STATUS_JSON = 9,
  FRACDYN_STATUS_BUFFER_TOO_SMALL = 10,
  FRACDYN_STATUS_INTERNAL = 11,
  FRACDYN_STATUS_PANIC = 12,
} FracdynStatus;

/**
 * Spin-boson bath parameters.
 */
typedef struct FracdynBath FracdynBath;

/**
 * Quantum dynamical generator (Hamiltonian plus jump channels).
 */
typedef struct FracdynGenerator FracdynGenerator;

/**
 * Density matrix.
 */
typedef struct FracdynState FracdynState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *fracdyn_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *fracdyn_last_error(void);

/**
 * Γ(x).
 *
 * # Safety
 * `result` must be NULL or point to writable memory for one double.
 */
enum FracdynStatus fracdyn_gamma(double x, double *result);

/**
 * E_α(z) for real z and 0 < α ≤ 1.
 *
 * # Safety
 * `result` must be NULL or point to writable memory for one double.
 */
enum FracdynStatus fracdyn_mittag_leffler(double alpha, double z, double *result);

/**
 * M-Wright function M_α(z) for z ≥ 0 and 0 < α < 1.
 *
 * # Safety
 * `result` must be NULL or point to writable memory for one double.
 */
enum FracdynStatus fracdyn_m_wright(double alpha, double z, double *result);

/**
 * Semigroup defect |E(t) − E(t−τ)E(τ)| of a relaxing mode with rate λ.
 *
 * # Safety
 * `result` must be NULL or point to writable memory for one double.
 */
enum FracdynStatus fracdyn_divisibility_defect(double alpha,
                                               double lambda,
                                               double t,
                                               double tau,
                                               double *result);

/**
 * Parses a generator from its JSON layout.
 *
 * # Safety
 * `json` must be NULL or a NUL-terminated string; `generator` must be NULL
 * or point to writable memory for one pointer.
 */
enum FracdynStatus fracdyn_generator_from_json(const char *json,
                                               struct FracdynGenerator **generator);

/**
 * Qubit with H = (ε/2)σ_z and dephasing σ_z at rate γ.
 *
 * # Safety
 * `generator` must be NULL or point to writable memory for one pointer.
 */
enum FracdynStatus fracdyn_generator_dephasing_qubit(double epsilon,
                                                     double gamma,
                                                     struct FracdynGenerator **generator);

/**
 * Hilbert-space dimension, or 0 for NULL.
 *
 * # Safety
 * `generator` must be NULL or a live handle.
 */
size_t fracdyn_generator_dim(const struct FracdynGenerator *generator);

/**
 * # Safety
 * `generator` must be NULL or a handle not yet freed.
 */
void fracdyn_generator_free(struct FracdynGenerator *generator);

/**
 * Parses a density matrix from its JSON layout.
 *
 * # Safety
 * `json` must be NULL or a NUL-terminated string; `state` must be NULL or
 * point to writable memory for one pointer.
 */
enum FracdynStatus fracdyn_state_from_json(const char *json, struct FracdynState **state);

/**
 * The qubit state |+⟩⟨+|.
 *
 * # Safety
 * `state` must be NULL or point to writable memory for one pointer.
 */
enum FracdynStatus fracdyn_state_plus(struct FracdynState **state);

/**
 * Dimension of the state, or 0 for NULL.
 *
 * # Safety
 * `state` must be NULL or a live handle.
 */
size_t fracdyn_state_dim(const struct FracdynState *state);

/**
 * Copies the entries row-major as interleaved (re, im) pairs; `len` is the
 * buffer length in doubles and must be at least 2·dim².
 *
 * # Safety
 * `state` must be NULL or a live handle; `buffer` must be NULL or point to
 * `len` writable doubles.
 */
enum FracdynStatus fracdyn_state_entries(const struct FracdynState *state,
                                         double *buffer,
                                         size_t len);

/**
 * # Safety
 * `state` must be NULL or a handle not yet freed.
 */
void fracdyn_state_free(struct FracdynState *state);

/**
 * ρ(t) of the fractional master equation of order α through the
 * Mittag-Leffler spectral propagator. The result is a new handle.
 *
 * # Safety
 * `generator` and `initial` must be NULL or live handles; `result` must be
 * NULL or point to writable memory for one pointer.
 */
enum FracdynStatus fracdyn_propagate(const struct FracdynGenerator *generator,
                                     double alpha,
                                     double t,
                                     const struct FracdynState *initial,
                                     struct FracdynState **result);

/**
 * Bath with J(ω) = η ω^χ ω_c^{1−χ} e^{−ω/ω_c}; pass `INFINITY` for β at
 * zero temperature.
 *
 * # Safety
 * `bath` must be NULL or point to writable memory for one pointer.
 */
enum FracdynStatus fracdyn_bath_new(double eta,
                                    double chi,
                                    double omega_c,
                                    double beta,
                                    struct FracdynBath **bath);

/**
 * # Safety
 * `bath` must be NULL or a handle not yet freed.
 */
void fracdyn_bath_free(struct FracdynBath *bath);

/**
 * Dephasing exponent Q(t).
 *
 * # Safety
 * `bath` must be NULL or a live handle; `result` must be NULL or point to
 * writable memory for one double.
 */
enum FracdynStatus fracdyn_dephasing_q(const struct FracdynBath *bath, double t, double *result);

/**
 * Exact coherence u(t) = e^{iεt − Q(t)} at `n` nondecreasing times, written
 * to `values` as `n` interleaved (re, im) pairs.
 *
 * # Safety
 * `bath` must be NULL or a live handle; `times` must be NULL or point to
 * `n` readable doubles; `values` must be NULL or point to 2·n writable
 * doubles.
 */
enum FracdynStatus fracdyn_exact_coherence(const struct FracdynBath *bath,
                                           double epsilon,
                                           const double *times,
                                           size_t n,
                                           double *values);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACDYN_H */
