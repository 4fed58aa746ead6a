#ifndef METRIC_EMBED_H
#define METRIC_EMBED_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MeStatus {
  ME_STATUS_OK = 0,
  ME_STATUS_NULL_POINTER = 1,
  /**
   * The input is not a metric space (asymmetric, triangle violation, ...).
   */
  ME_STATUS_INVALID_METRIC = 2,
  ME_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The construction could not be carried out on this input.
   */
  ME_STATUS_UNSUPPORTED = 4,
  ME_STATUS_PANIC = 255,
} MeStatus;

typedef struct MeLpEmbedding MeLpEmbedding;

typedef struct MeProperEmbedding MeProperEmbedding;

/**
 * Outcome of a pairwise bound check.
 */
typedef struct MeReport MeReport;

/**
 * A validated finite metric space.
 */
typedef struct MeSpace MeSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *me_last_error(void);

/**
 * Validates a row-major `n x n` distance matrix.
 *
 * # Safety
 * `dist` must point to `n * n` readable doubles and `out` must be writable.
 */
enum MeStatus me_space_new(const double *dist, size_t n, struct MeSpace **out);

/**
 * # Safety
 * `space` must be null or a live handle.
 */
size_t me_space_len(const struct MeSpace *space);

/**
 * # Safety
 * `space` must be null or a handle not yet freed.
 */
void me_space_free(struct MeSpace *space);

/**
 * Builds the dyadic Fréchet embedding of `space` pointed at `basepoint`.
 * With `seeded` set the block factors are drawn from `[1/2, 1]` using
 * `seed`; otherwise every factor is 1.
 *
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum MeStatus me_proper_embed(const struct MeSpace *space,
                              size_t basepoint,
                              bool seeded,
                              uint64_t seed,
                              struct MeProperEmbedding **out);

/**
 * # Safety
 * `emb` must be a live handle and `out` writable.
 */
enum MeStatus me_proper_image_distance(const struct MeProperEmbedding *emb,
                                       size_t a,
                                       size_t b,
                                       double *out);

/**
 * Truncated weight sum used in the upper bound `9 C_trunc d`.
 *
 * # Safety
 * `emb` must be a live handle and `out` writable.
 */
enum MeStatus me_proper_c_trunc(const struct MeProperEmbedding *emb, double *out);

/**
 * # Safety
 * `emb` must be a live handle and `out` writable.
 */
enum MeStatus me_proper_verify(const struct MeProperEmbedding *emb, struct MeReport **out);

/**
 * # Safety
 * `emb` must be null or a handle not yet freed.
 */
void me_proper_free(struct MeProperEmbedding *emb);

/**
 * Embeds `n` points of dimension `dim` (row-major) under the `lp` distance.
 * `p` may be `INFINITY`. With `random_theta` set the block factors are
 * drawn from `[1/(1+delta), 1]` using `seed`.
 *
 * # Safety
 * `points` must point to `n * dim` readable doubles and `out` must be writable.
 */
enum MeStatus me_lp_embed(const double *points,
                          size_t n,
                          size_t dim,
                          double p,
                          size_t basepoint,
                          double delta,
                          double lambda_sim,
                          bool random_theta,
                          uint64_t seed,
                          struct MeLpEmbedding **out);

/**
 * `|f(a) - f(b)|` for the normalized point set.
 *
 * # Safety
 * `emb` must be a live handle and `out` writable.
 */
enum MeStatus me_lp_image_distance(const struct MeLpEmbedding *emb,
                                   size_t a,
                                   size_t b,
                                   double *out);

/**
 * # Safety
 * `emb` must be a live handle and `out` writable.
 */
enum MeStatus me_lp_verify(const struct MeLpEmbedding *emb, struct MeReport **out);

/**
 * # Safety
 * `emb` must be null or a handle not yet freed.
 */
void me_lp_free(struct MeLpEmbedding *emb);

/**
 * True when every pair satisfied the envelope.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
bool me_report_passed(const struct MeReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
size_t me_report_pair_count(const struct MeReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
size_t me_report_failed_count(const struct MeReport *report);

/**
 * Smallest `|f(a)-f(b)| - lower(d)` over all pairs, or NaN with no pairs.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum MeStatus me_report_worst_lower_slack(const struct MeReport *report, double *out);

/**
 * Smallest `upper(d) - |f(a)-f(b)|` over all pairs, or NaN with no pairs.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum MeStatus me_report_worst_upper_slack(const struct MeReport *report, double *out);

/**
 * Full report as JSON. Release the string with [`me_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum MeStatus me_report_to_json(const struct MeReport *report, char **out);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void me_report_free(struct MeReport *report);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void me_string_free(char *s);

/**
 * Lower envelope `gamma(t)` for `t > 0`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MeStatus me_gamma_bound(double t, double *out);

/**
 * Sum of `1 / (m^2 + 1)` over all integers `m`.
 */
double me_series_constant(void);

/**
 * Block index of `(n, k)`, `k >= 1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MeStatus me_pair_index(int64_t n, int64_t k, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* METRIC_EMBED_H */
