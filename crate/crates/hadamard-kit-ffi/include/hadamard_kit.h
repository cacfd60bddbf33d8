/* C ABI for hadamard-kit: products of holomorphic functions over certified contours. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by fallible calls.
 */
typedef enum HkStatus {
  HK_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  HK_STATUS_NULL_ARGUMENT = 1,
  /**
   * Arguments were malformed (bad UTF-8, bad JSON, unknown preset, ...).
   */
  HK_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The operation is undefined for these inputs (domain error).
   */
  HK_STATUS_DOMAIN_ERROR = 3,
  /**
   * A numeric tolerance could not be met.
   */
  HK_STATUS_NUMERIC_ERROR = 4,
} HkStatus;

/**
 * Opaque handle: a holomorphic function with its declared singular set.
 */
typedef struct HkFunction HkFunction;

/**
 * Opaque handle: a closed subset of C* as a union of log-polar boxes.
 */
typedef struct HkStarSet HkStarSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version string; a static, do not free.
 */
const char *hk_version(void);

/**
 * Message of the most recent error on this thread; valid until the next
 * failing call on the same thread. Do not free.
 */
const char *hk_last_error_message(void);

/**
 * Release a string returned by the library.
 *
 * # Safety
 * `s` must come from this library and not have been freed before.
 */
void hk_string_free(char *s);

/**
 * Parse a star set from its JSON record
 * `{ "label": ..., "boxes": [ { "rho": [lo, hi], "arc": ... } ] }`.
 * Returns null on failure (see `hk_last_error_message`).
 *
 * # Safety
 * `json` must be a valid NUL-terminated string.
 */
struct HkStarSet *hk_starset_parse_json(const char *json);

/**
 * Build a named preset such as `ray(3.1415, 1.0)` or `disk_complement(2.0)`.
 *
 * # Safety
 * `spec` must be a valid NUL-terminated string.
 */
struct HkStarSet *hk_starset_preset(const char *spec);

/**
 * Serialize a star set to its JSON record. Free with `hk_string_free`.
 *
 * # Safety
 * `set` must be a live handle from this library.
 */
char *hk_starset_to_json(const struct HkStarSet *set);

/**
 * # Safety
 * `set` must be a live handle from this library (or null).
 */
void hk_starset_free(struct HkStarSet *set);

/**
 * Exact product set; null on failure.
 *
 * # Safety
 * Both arguments must be live handles.
 */
struct HkStarSet *hk_starset_product(const struct HkStarSet *a, const struct HkStarSet *b);

/**
 * Exact inverse set {z : 1/z in S}.
 *
 * # Safety
 * `a` must be a live handle.
 */
struct HkStarSet *hk_starset_inverse(const struct HkStarSet *a);

/**
 * Exact scaled set z*S for nonzero z = re + i*im.
 *
 * # Safety
 * `a` must be a live handle.
 */
struct HkStarSet *hk_starset_scale(const struct HkStarSet *a, double re, double im);

/**
 * Membership within tolerance `tol` in cylinder coordinates.
 *
 * # Safety
 * `a` and `out` must be valid pointers.
 */
enum HkStatus hk_starset_contains(const struct HkStarSet *a,
                                  double re,
                                  double im,
                                  double tol,
                                  bool *out);

/**
 * Properness: the boxes do not cover the whole cylinder.
 *
 * # Safety
 * `a` and `out` must be valid pointers.
 */
enum HkStatus hk_starset_is_proper(const struct HkStarSet *a, bool *out);

/**
 * Build a function from expression text and a singular set (cloned); the
 * `vanishes_at_inf` assertion is verified when testable. Null on failure.
 *
 * # Safety
 * `expr` must be NUL-terminated; `singular` must be a live handle.
 */
struct HkFunction *hk_function_new(const char *expr,
                                   const struct HkStarSet *singular,
                                   bool vanishes_at_inf);

/**
 * # Safety
 * `f` must be a live handle from this library (or null).
 */
void hk_function_free(struct HkFunction *f);

/**
 * Evaluate the function at z = re + i*im.
 *
 * # Safety
 * All pointers must be valid.
 */
enum HkStatus hk_function_eval(const struct HkFunction *f,
                               double re,
                               double im,
                               double *out_re,
                               double *out_im);

/**
 * Generalized Hadamard product (f1 * f2)(z).
 *
 * # Safety
 * All pointers must be valid.
 */
enum HkStatus hk_hadamard_at(const struct HkFunction *f1,
                             const struct HkFunction *f2,
                             double re,
                             double im,
                             double *out_re,
                             double *out_im);

/**
 * Table-based product of Pohlen type.
 *
 * # Safety
 * All pointers must be valid.
 */
enum HkStatus hk_pohlen_at(const struct HkFunction *f1,
                           const struct HkFunction *f2,
                           double re,
                           double im,
                           double *out_re,
                           double *out_im);

/**
 * (f1 * f2 - f2 * f1)(z).
 *
 * # Safety
 * All pointers must be valid.
 */
enum HkStatus hk_commutativity_defect(const struct HkFunction *f1,
                                      const struct HkFunction *f2,
                                      double re,
                                      double im,
                                      double *out_re,
                                      double *out_im);

/**
 * Small-circle residue probe at radius r around 0; equals f1(0) f2(inf)
 * for admissible inputs.
 *
 * # Safety
 * All pointers must be valid.
 */
enum HkStatus hk_residue_zero_loop(const struct HkFunction *f1,
                                   const struct HkFunction *f2,
                                   double re,
                                   double im,
                                   double r,
                                   double *out_re,
                                   double *out_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
