#ifndef SPARSE_FOREST_H
#define SPARSE_FOREST_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  SF_STATUS_CONFIG = 2,
  SF_STATUS_DIMENSION = 3,
  SF_STATUS_DATA = 4,
  SF_STATUS_IO = 5,
  SF_STATUS_PANIC = 6,
} SfStatus;

/**
 * Values of [`SfForestParams::policy`].
 */
typedef enum SfPolicy {
  SF_POLICY_PURELY_RANDOM = 0,
  SF_POLICY_GUIDED = 1,
  SF_POLICY_CART = 2,
} SfPolicy;

/**
 * Opaque fitted forest.
 */
typedef struct SfForest SfForest;

/**
 * Fitting parameters. Zero in `m_try` or `target_leaves` selects the default
 * (`d` for the guided regime, `max(d/3, 1)` for CART; `ceil(n/5)` leaves).
 */
typedef struct SfForestParams {
  /**
   * One of the [`SfPolicy`] values.
   */
  uint32_t policy;
  size_t k_n;
  size_t trees;
  size_t m_try;
  size_t target_leaves;
  uint64_t seed;
} SfForestParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fits a forest on `n` rows of `d` covariates `x` with responses `y`.
 *
 * `probs` (length `d`) sets the split probabilities of the purely random
 * regime and may be null for uniform. `split_x`/`split_y` (`split_n` rows) is
 * the independent sample of the guided regime and is ignored otherwise.
 * On success `*out` owns a new forest, to be released with [`sf_forest_free`].
 *
 * # Safety
 * All non-null pointers must reference arrays of the stated lengths.
 */
enum SfStatus sf_forest_fit(const double *x,
                            const double *y,
                            size_t n,
                            size_t d,
                            const struct SfForestParams *params,
                            const double *probs,
                            const double *split_x,
                            const double *split_y,
                            size_t split_n,
                            struct SfForest **out);

/**
 * Writes one prediction per query row into `out` (length `n`).
 *
 * # Safety
 * `forest` must come from [`sf_forest_fit`]; `x` holds `n * d` doubles and
 * `out` room for `n`.
 */
enum SfStatus sf_forest_predict(const struct SfForest *forest,
                                const double *x,
                                size_t n,
                                size_t d,
                                double *out);

/**
 * Writes the per-coordinate split totals (length `d`) into `out`.
 *
 * # Safety
 * `forest` must come from [`sf_forest_fit`] and `out` have room for `d` values.
 */
enum SfStatus sf_forest_split_counts(const struct SfForest *forest, uint64_t *out, size_t d);

/**
 * Covariate dimension of a fitted forest, 0 for a null handle.
 *
 * # Safety
 * `forest` must be null or come from [`sf_forest_fit`].
 */
size_t sf_forest_dimension(const struct SfForest *forest);

/**
 * Number of trees, 0 for a null handle.
 *
 * # Safety
 * `forest` must be null or come from [`sf_forest_fit`].
 */
size_t sf_forest_tree_count(const struct SfForest *forest);

/**
 * Releases a forest. Null is accepted.
 *
 * # Safety
 * `forest` must be null or come from [`sf_forest_fit`], and not be used again.
 */
void sf_forest_free(struct SfForest *forest);

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sf_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *sf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPARSE_FOREST_H */
