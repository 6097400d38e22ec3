/* C interface to lqt-core. Every function returns an LqtStatus unless noted;
 * call lqt_last_error_message after a non-OK status for details. */

#ifndef LQT_H
#define LQT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LqtStatus {
  LQT_STATUS_OK = 0,
  LQT_STATUS_NULL_POINTER = 1,
  /**
   * Wrong shape, length or qubit count.
   */
  LQT_STATUS_SHAPE = 2,
  /**
   * Input is not a valid representation (non-Hermitian, not unitary, ...).
   */
  LQT_STATUS_REPRESENTATION = 3,
  LQT_STATUS_INVALID_ARGUMENT = 4,
  LQT_STATUS_NUMERICAL = 5,
  LQT_STATUS_IO = 6,
  LQT_STATUS_PARSE = 7,
  LQT_STATUS_PANIC = 8,
  /**
   * An output buffer is shorter than required.
   */
  LQT_STATUS_BUFFER_TOO_SMALL = 9,
} LqtStatus;

typedef enum LqtVerdict {
  LQT_VERDICT_LOCAL = 0,
  LQT_VERDICT_QUANTUM_ENTANGLER_PLUS = 1,
  LQT_VERDICT_PARTIAL_TRANSPOSE_ENTANGLER_MINUS = 2,
  LQT_VERDICT_INADMISSIBLE = 3,
} LqtVerdict;

/**
 * A Bloch tensor (state or unnormalized operator).
 */
typedef struct LqtBloch LqtBloch;

/**
 * The result of [`lqt_classify`].
 */
typedef struct LqtClassification LqtClassification;

/**
 * A generator acting on Bloch tensors.
 */
typedef struct LqtGenerator LqtGenerator;

/**
 * A finite transformation acting on Bloch tensors.
 */
typedef struct LqtTransform LqtTransform;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). `needed` (optional) receives the full length
 * including the terminator, or 0 when there is no error.
 *
 * # Safety
 * `buf` must be writable for `len` bytes or null with `len == 0`; `needed`
 * must be null or writable.
 */
enum LqtStatus lqt_last_error_message(char *buf, size_t len, size_t *needed);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lqt_version(void);

/**
 * Bloch tensor of a `dim x dim` Hermitian operator given as `2 dim²`
 * interleaved `(re, im)` values, row-major.
 *
 * # Safety
 * `re_im` must point to `2 * dim * dim` doubles; `out` must be writable.
 */
enum LqtStatus lqt_bloch_from_hermitian(const double *re_im, size_t dim, struct LqtBloch **out);

/**
 * Bloch tensor from its `4^n` coefficients.
 *
 * # Safety
 * `coeffs` must point to `len` doubles; `out` must be writable.
 */
enum LqtStatus lqt_bloch_new(const double *coeffs, size_t len, struct LqtBloch **out);

/**
 * Product tensor `v(a1, .., an)` from `n` Bloch vectors stored as `3n`
 * doubles. Each vector must have norm at most 1.
 *
 * # Safety
 * `vectors3` must point to `3 * n` doubles; `out` must be writable.
 */
enum LqtStatus lqt_bloch_product(const double *vectors3, size_t n, struct LqtBloch **out);

/**
 * Number of coefficients (`4^n`); 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t lqt_bloch_len(const struct LqtBloch *r);

/**
 * Copies the coefficients into `out` (at least `lqt_bloch_len` values).
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable for `len` doubles.
 */
enum LqtStatus lqt_bloch_coeffs(const struct LqtBloch *r, double *out, size_t len);

/**
 * Writes the Hermitian operator as `2 * 4^n` interleaved `(re, im)` values.
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable for `len` doubles.
 */
enum LqtStatus lqt_bloch_to_hermitian(const struct LqtBloch *r, double *out, size_t len);

/**
 * No-signalling check of a state; `deviation` receives the largest marginal
 * deviation and `passed` whether it is within `tol`.
 *
 * # Safety
 * `r` must be a live handle; `deviation` and `passed` must be writable.
 */
enum LqtStatus lqt_bloch_check_no_signalling(const struct LqtBloch *r,
                                             double tol,
                                             double *deviation,
                                             bool *passed);

/**
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void lqt_bloch_free(struct LqtBloch *r);

/**
 * Generator of `ρ ↦ [i P, ρ]` for the Pauli string `P` given by `n` indices
 * in `0..=3`.
 *
 * # Safety
 * `gammas` must point to `n` bytes; `out` must be writable.
 */
enum LqtStatus lqt_generator_quantum(const uint8_t *gammas, size_t n, struct LqtGenerator **out);

/**
 * Generator from a row-major `4^n x 4^n` matrix of `len` doubles.
 *
 * # Safety
 * `data` must point to `len` doubles; `out` must be writable.
 */
enum LqtStatus lqt_generator_new(const double *data, size_t len, struct LqtGenerator **out);

/**
 * Number of qubits; 0 for a null handle.
 *
 * # Safety
 * `x` must be null or a live handle.
 */
size_t lqt_generator_qubits(const struct LqtGenerator *x);

/**
 * Copies the row-major matrix (`16^n` values) into `out`.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable for `len` doubles.
 */
enum LqtStatus lqt_generator_data(const struct LqtGenerator *x, double *out, size_t len);

/**
 * # Safety
 * `x` must be null or a handle not yet freed.
 */
void lqt_generator_free(struct LqtGenerator *x);

/**
 * `exp(t X)`.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum LqtStatus lqt_transform_exp(const struct LqtGenerator *x, double t, struct LqtTransform **out);

/**
 * `H r` as a new tensor.
 *
 * # Safety
 * `h` and `r` must be live handles; `out` must be writable.
 */
enum LqtStatus lqt_transform_apply(const struct LqtTransform *h,
                                   const struct LqtBloch *r,
                                   struct LqtBloch **out);

/**
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void lqt_transform_free(struct LqtTransform *h);

/**
 * `pᵀ H r` for the product effect `p = 2^-n v(b1, .., bn)` given by `3n`
 * doubles. `h` may be null for the identity. The value is not clamped.
 *
 * # Safety
 * `effect3` must point to `3 * n` doubles; `h` null or live; `r` live;
 * `out` writable.
 */
enum LqtStatus lqt_outcome_probability(const double *effect3,
                                       size_t n,
                                       const struct LqtTransform *h,
                                       const struct LqtBloch *r,
                                       double *out);

/**
 * Samples product states and effects and reports the largest excursion of
 * `2^-n v(b)ᵀ H v(a)` outside `[0, 1]`.
 *
 * # Safety
 * `h` must be a live handle; `max_violation` and `passed` writable.
 */
enum LqtStatus lqt_range_check(const struct LqtTransform *h,
                               uint64_t samples,
                               uint64_t seed,
                               double tol,
                               double *max_violation,
                               bool *passed);

/**
 * Dimension of the first-order constraint nullspace for `n` qubits (paper
 * row plan) and its spectral gap.
 *
 * # Safety
 * `dimension` must be writable; `gap` may be null.
 */
enum LqtStatus lqt_nullspace_dimension(size_t n, size_t *dimension, double *gap);

/**
 * Runs the negative-probability demonstration. Both outputs are optional.
 *
 * # Safety
 * Each output must be null or writable.
 */
enum LqtStatus lqt_negativity_demo(double *min_eigenvalue, double *probability_00);

/**
 * Classifies a generator. `tol` is relative; `samples` random constraint
 * samples are drawn from `seed`.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum LqtStatus lqt_classify(const struct LqtGenerator *x,
                            double tol,
                            uint64_t seed,
                            uint64_t samples,
                            struct LqtClassification **out);

/**
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum LqtStatus lqt_classification_verdict(const struct LqtClassification *c, enum LqtVerdict *out);

/**
 * Entangled qubit pair, if the verdict has one. `p` and `q` are left
 * untouched when `has_pair` is false.
 *
 * # Safety
 * `c` must be a live handle; the outputs must be writable.
 */
enum LqtStatus lqt_classification_pair(const struct LqtClassification *c,
                                       bool *has_pair,
                                       size_t *p,
                                       size_t *q);

/**
 * `+1` or `-1` for entanglers, 0 otherwise.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum LqtStatus lqt_classification_sign(const struct LqtClassification *c, int8_t *out);

/**
 * Full result as JSON. Release the string with [`lqt_string_free`].
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum LqtStatus lqt_classification_to_json(const struct LqtClassification *c, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void lqt_string_free(char *s);

/**
 * # Safety
 * `c` must be null or a handle not yet freed.
 */
void lqt_classification_free(struct LqtClassification *c);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LQT_H */
