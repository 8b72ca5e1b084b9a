#ifndef CHARSUM_H
#define CHARSUM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. `CS_STATUS_OK` is zero.
 */
typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_INPUT = 2,
  CS_STATUS_BUDGET_EXCEEDED = 3,
  CS_STATUS_NUMERICAL = 4,
  CS_STATUS_MISSING_STATE = 5,
  CS_STATUS_PANIC = 6,
} CsStatus;

/**
 * Energy computation route.
 */
typedef enum CsEnergyMethod {
  CS_ENERGY_METHOD_BRUTE = 0,
  CS_ENERGY_METHOD_SPECTRAL = 1,
} CsEnergyMethod;

/**
 * Opaque field context with its discrete-log table.
 */
typedef struct CsField CsField;

typedef struct CsSum {
  double re;
  double im;
  double magnitude;
  double trivial_bound;
  double ratio;
  bool restriction_trivial;
} CsSum;

typedef struct CsWeil {
  double sum_mag;
  double bound;
  uint64_t m;
  uint64_t dd;
  bool admissible;
  bool pass;
} CsWeil;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread; empty after success.
 * Valid until the next call into this library on the same thread.
 */
const char *cs_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cs_version(void);

/**
 * Builds `F_{p^d}` with its discrete-log table. Free with [`cs_field_free`].
 */
enum CsStatus cs_field_new(uint64_t p, uint32_t d, struct CsField **out);

/**
 * Releases a handle. Null is ignored.
 */
void cs_field_free(struct CsField *field);

/**
 * `p^d`, or 0 for a null handle.
 */
uint64_t cs_field_size(const struct CsField *field);

/**
 * Encoding of the generator used for discrete logs.
 */
enum CsStatus cs_field_generator(const struct CsField *field, uint64_t *out);

/**
 * Copies the `d + 1` minimal-polynomial coefficients (constant first).
 */
enum CsStatus cs_field_min_poly(const struct CsField *field, uint64_t *out, size_t cap);

enum CsStatus cs_field_mul(const struct CsField *field, uint64_t a, uint64_t b, uint64_t *out);

enum CsStatus cs_field_inv(const struct CsField *field, uint64_t a, uint64_t *out);

/**
 * Norm to `F_p`.
 */
enum CsStatus cs_field_norm(const struct CsField *field, uint64_t a, uint64_t *out);

/**
 * `log_g(a)` for nonzero `a`.
 */
enum CsStatus cs_field_dlog(const struct CsField *field, uint64_t a, uint64_t *out);

/**
 * `chi_k(a) = e(k log_g(a) / (p^d - 1))`, zero at `a = 0`.
 */
enum CsStatus cs_char_eval(const struct CsField *field,
                           uint64_t k,
                           uint64_t a,
                           double *re,
                           double *im);

/**
 * `sum_{x in I, y in J} chi_k(x + omega y)` over a cubic extension.
 */
enum CsStatus cs_grid_sum(const struct CsField *field,
                          uint64_t omega,
                          int64_t i_start,
                          uint64_t i_len,
                          int64_t j_start,
                          uint64_t j_len,
                          uint64_t k,
                          uint64_t budget,
                          struct CsSum *out);

/**
 * `sum_{x in I, y in J} chi_k(x^3 + a x^2 y + b x y^2 + c y^3)` over `F_p`.
 */
enum CsStatus cs_cubic_form_sum(uint64_t p,
                                int64_t a,
                                int64_t b,
                                int64_t c,
                                int64_t i_start,
                                uint64_t i_len,
                                int64_t j_start,
                                uint64_t j_len,
                                uint64_t k,
                                uint64_t budget,
                                struct CsSum *out);

/**
 * Threshold exponent for degree `d >= 3`.
 */
enum CsStatus cs_rho_threshold(uint32_t d, double *out);

/**
 * Multiplicative energy `E(A, B)` of two encoding arrays.
 */
enum CsStatus cs_energy_pair(const struct CsField *field,
                             const uint64_t *a,
                             size_t a_len,
                             const uint64_t *b,
                             size_t b_len,
                             enum CsEnergyMethod method,
                             uint64_t budget,
                             uint64_t *out);

/**
 * Factorization case 1, 2 or 3 of a non-degenerate form mod `p > 3`.
 */
enum CsStatus cs_classify_form(uint64_t p, int64_t a, int64_t b, int64_t c, uint8_t *case_out);

/**
 * Weil-bound check for `chi_k` and `f` (coefficients constant first, as
 * encodings in the handle's field).
 */
enum CsStatus cs_weil_field_check(const struct CsField *field,
                                  uint64_t k,
                                  const uint64_t *coeffs,
                                  size_t len,
                                  struct CsWeil *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHARSUM_H */
