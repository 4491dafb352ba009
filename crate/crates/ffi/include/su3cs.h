#ifndef SU3CS_H
#define SU3CS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Largest `j1` accepted; the dimension grows quadratically.
 */
#define SU3_MAX_J1 200

typedef enum Su3Status {
  SU3_STATUS_OK = 0,
  SU3_STATUS_NULL_POINTER = 1,
  SU3_STATUS_INVALID_ARGUMENT = 2,
  SU3_STATUS_DIMENSION_MISMATCH = 3,
  SU3_STATUS_DEGENERATE_ALPHA = 4,
  SU3_STATUS_NOT_COHERENT = 5,
  SU3_STATUS_NUMERICAL = 6,
  SU3_STATUS_BUFFER_TOO_SMALL = 7,
  SU3_STATUS_OUT_OF_RANGE = 8,
  SU3_STATUS_PANIC = 9,
} Su3Status;

/**
 * Generator indices accepted where a `uint32_t generator` is expected.
 */
typedef enum Su3Generator {
  SU3_GENERATOR_E1 = 0,
  SU3_GENERATOR_E2 = 1,
  SU3_GENERATOR_E3 = 2,
  SU3_GENERATOR_F1 = 3,
  SU3_GENERATOR_F2 = 4,
  SU3_GENERATOR_F3 = 5,
  SU3_GENERATOR_H1 = 6,
  SU3_GENERATOR_H2 = 7,
  SU3_GENERATOR_H3 = 8,
} Su3Generator;

/**
 * Opaque representation handle.
 */
typedef struct Su3Rep Su3Rep;

/**
 * Opaque intelligent-state spectrum handle.
 */
typedef struct Su3Spectrum Su3Spectrum;

/**
 * Opaque state handle.
 */
typedef struct Su3State Su3State;

typedef struct Su3Complex {
  double re;
  double im;
} Su3Complex;

/**
 * One eigenstate of a solved spectrum, without its amplitudes.
 */
typedef struct Su3Eigenstate {
  struct Su3Complex lambda;
  /**
   * Meaningful only when `has_lambda_prime` is set.
   */
  struct Su3Complex lambda_prime;
  bool has_lambda_prime;
  uint32_t block;
  size_t eigenspace;
  size_t multiplicity;
} Su3Eigenstate;

/**
 * Moments of the quadratures `(p_i, q_i)` in a state.
 */
typedef struct Su3MomentReport {
  double mean_p;
  double mean_q;
  double var_p;
  double var_q;
  /**
   * `<c> / 2`.
   */
  double cov;
  /**
   * `<c>`, the full anticommutator expectation.
   */
  double cov_total;
  double mean_h;
  double delta;
  double sr_lhs;
  double sr_rhs;
} Su3MomentReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next `su3_*` call on the same thread.
 */
const char *su3_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *su3_version(void);

/**
 * Creates the representation with `j1` quanta.
 *
 * # Safety
 * `out` must be NULL or valid for a pointer write.
 */
enum Su3Status su3_rep_new(uint32_t j1, struct Su3Rep **out);

/**
 * Releases a representation; NULL is ignored.
 *
 * # Safety
 * `rep` must be NULL or a handle from `su3_rep_new` not yet freed.
 */
void su3_rep_free(struct Su3Rep *rep);

/**
 * Dimension `(j1+1)(j1+2)/2`.
 *
 * # Safety
 * `rep` must be a live handle; `out` valid for a write.
 */
enum Su3Status su3_rep_dim(const struct Su3Rep *rep, size_t *out);

/**
 * Labels `(j2, j3)` of basis vector `index`.
 *
 * # Safety
 * `rep` must be a live handle; `j2` and `j3` valid for writes.
 */
enum Su3Status su3_rep_labels(const struct Su3Rep *rep, size_t index, uint32_t *j2, uint32_t *j3);

/**
 * Writes the `dim x dim` matrix of a generator (see [`Su3Generator`]) row-major.
 *
 * # Safety
 * `rep` must be a live handle; `out` valid for `len` writes.
 */
enum Su3Status su3_generator_matrix(const struct Su3Rep *rep,
                                    uint32_t generator_index,
                                    struct Su3Complex *out,
                                    size_t len);

/**
 * Normalized coherent state at projective coordinates `(zeta1, zeta2)`.
 *
 * # Safety
 * `rep` must be a live handle; `out` valid for a pointer write.
 */
enum Su3Status su3_coherent_state(const struct Su3Rep *rep,
                                  struct Su3Complex zeta1,
                                  struct Su3Complex zeta2,
                                  struct Su3State **out);

/**
 * Highest-weight state displaced by `exp(z1 f1 + z2 f3 - h.c.)`.
 *
 * # Safety
 * `rep` must be a live handle; `out` valid for a pointer write.
 */
enum Su3Status su3_displaced_state(const struct Su3Rep *rep,
                                   struct Su3Complex z1,
                                   struct Su3Complex z2,
                                   struct Su3State **out);

/**
 * State from `len` amplitudes in basis order; `len` must equal the dimension.
 *
 * # Safety
 * `rep` must be a live handle; `amplitudes` valid for `len` reads; `out`
 * valid for a pointer write.
 */
enum Su3Status su3_state_from_amplitudes(const struct Su3Rep *rep,
                                         const struct Su3Complex *amplitudes,
                                         size_t len,
                                         struct Su3State **out);

/**
 * Releases a state; NULL is ignored.
 *
 * # Safety
 * `state` must be NULL or a live state handle.
 */
void su3_state_free(struct Su3State *state);

/**
 * Number of amplitudes.
 *
 * # Safety
 * `state` must be a live handle; `out` valid for a write.
 */
enum Su3Status su3_state_dim(const struct Su3State *state, size_t *out);

/**
 * Copies the amplitudes into `out`.
 *
 * # Safety
 * `state` must be a live handle; `out` valid for `len` writes.
 */
enum Su3Status su3_state_amplitudes(const struct Su3State *state,
                                    struct Su3Complex *out,
                                    size_t len);

/**
 * Recovers `(zeta1, zeta2)` of a coherent state and the reconstruction
 * distance. Fails with `NOT_COHERENT` when the state is off the manifold.
 *
 * # Safety
 * `state` must be a live handle; output pointers valid for writes.
 */
enum Su3Status su3_extract_zeta(const struct Su3State *state,
                                struct Su3Complex *zeta1,
                                struct Su3Complex *zeta2,
                                double *distance);

/**
 * Eigenstates of `(1+alpha) e_i + (1-alpha) f_i` for `pair` in 1..=3.
 * Degenerate `alpha = +-1` succeeds with only kernel vectors.
 *
 * # Safety
 * `rep` must be a live handle; `out` valid for a pointer write.
 */
enum Su3Status su3_solve_intelligent(const struct Su3Rep *rep,
                                     uint32_t pair,
                                     struct Su3Complex alpha,
                                     struct Su3Spectrum **out);

/**
 * Releases a spectrum; NULL is ignored.
 *
 * # Safety
 * `spectrum` must be NULL or a live spectrum handle.
 */
void su3_spectrum_free(struct Su3Spectrum *spectrum);

/**
 * Number of eigenstates held.
 *
 * # Safety
 * `spectrum` must be a live handle; `out` valid for a write.
 */
enum Su3Status su3_spectrum_len(const struct Su3Spectrum *spectrum, size_t *out);

/**
 * Whether `alpha = +-1` made the operator nilpotent.
 *
 * # Safety
 * `spectrum` must be a live handle; `out` valid for a write.
 */
enum Su3Status su3_spectrum_nilpotent(const struct Su3Spectrum *spectrum, bool *out);

/**
 * Spectral norm of the operator that was diagonalized.
 *
 * # Safety
 * `spectrum` must be a live handle; `out` valid for a write.
 */
enum Su3Status su3_spectrum_operator_norm(const struct Su3Spectrum *spectrum, double *out);

/**
 * Eigenvalue data of entry `index` (ordered by block, then `lambda'`).
 *
 * # Safety
 * `spectrum` must be a live handle; `out` valid for a write.
 */
enum Su3Status su3_spectrum_entry(const struct Su3Spectrum *spectrum,
                                  size_t index,
                                  struct Su3Eigenstate *out);

/**
 * New state handle holding a copy of eigenstate `index`.
 *
 * # Safety
 * `spectrum` must be a live handle; `out` valid for a pointer write.
 */
enum Su3Status su3_spectrum_state(const struct Su3Spectrum *spectrum,
                                  size_t index,
                                  struct Su3State **out);

/**
 * Quadrature moments of a normalized state for `pair` in 1..=3.
 *
 * # Safety
 * `state` must be a live handle; `out` valid for a write.
 */
enum Su3Status su3_uncertainty_report(const struct Su3State *state,
                                      uint32_t pair,
                                      struct Su3MomentReport *out);

/**
 * Residual of the `n`-th radial moment of the weight for `j`, `0 <= n <= j`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum Su3Status su3_moment_check(uint32_t j, uint32_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SU3CS_H */
