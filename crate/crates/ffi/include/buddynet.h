#ifndef BUDDYNET_H
#define BUDDYNET_H

/* Generated by cbindgen from crates/ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BuddynetRatioMode {
  BUDDYNET_RATIO_MODE_POOLED = 0,
  BUDDYNET_RATIO_MODE_PER_PAIR_MEAN = 1,
} BuddynetRatioMode;

typedef enum BuddynetSide {
  BUDDYNET_SIDE_PROJECT_IN = 0,
  BUDDYNET_SIDE_BACKER_OUT = 1,
} BuddynetSide;

typedef enum BuddynetStatus {
  BUDDYNET_STATUS_OK = 0,
  BUDDYNET_STATUS_NULL_POINTER = 1,
  BUDDYNET_STATUS_INVALID_UTF8 = 2,
  BUDDYNET_STATUS_IO = 3,
  BUDDYNET_STATUS_PARSE = 4,
  BUDDYNET_STATUS_UNDEFINED_RATIO = 5,
  BUDDYNET_STATUS_INVALID_ARGUMENT = 6,
  BUDDYNET_STATUS_BUFFER_TOO_SMALL = 7,
  BUDDYNET_STATUS_INTERNAL = 8,
} BuddynetStatus;

/**
 * Opaque CUG result handle.
 */
typedef struct BuddynetCugResult BuddynetCugResult;

/**
 * Opaque graph handle.
 */
typedef struct BuddynetGraph BuddynetGraph;

typedef struct BuddynetGraphCounts {
  size_t users;
  size_t backers;
  size_t projects;
  size_t edges;
} BuddynetGraphCounts;

typedef struct BuddynetDegreeSummary {
  size_t count;
  double mean;
  double std;
  double min;
  double q25;
  double median;
  double q75;
  double max;
  uint64_t mode;
  size_t zero_count;
} BuddynetDegreeSummary;

/**
 * Ratios and means are NaN when undefined.
 */
typedef struct BuddynetCensusSummary {
  uint64_t denominator;
  uint64_t numerator;
  double pooled_ratio;
  double per_pair_mean;
  double mean_cobackers;
  double mean_satisfied;
} BuddynetCensusSummary;

typedef struct BuddynetCugOptions {
  size_t trials;
  uint64_t master_seed;
  enum BuddynetRatioMode ratio_mode;
  bool exclude_founder_w;
  /**
   * 0 = all cores.
   */
  size_t parallelism;
} BuddynetCugOptions;

typedef struct BuddynetCugSummary {
  double observed_ratio;
  double p_value;
  double mean_simulated;
  size_t trials;
  uint64_t master_seed;
  size_t degenerate_trials;
} BuddynetCugSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *buddynet_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the buffer size needed for the
 * whole message including the NUL, or 0 when there is no message.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t buddynet_last_error_message(char *buf, size_t len);

/**
 * Loads a graph from `backings.csv` and `projects.csv` paths.
 *
 * # Safety
 * Both paths must be valid NUL-terminated strings; `out` must be a valid
 * pointer to write the handle to.
 */
enum BuddynetStatus buddynet_graph_load_files(const char *backings_path,
                                              const char *projects_path,
                                              struct BuddynetGraph **out);

/**
 * Loads a graph from in-memory CSV contents.
 *
 * # Safety
 * Each buffer must be valid for its length (or the length must be 0);
 * `out` must be a valid pointer.
 */
enum BuddynetStatus buddynet_graph_load_buffers(const uint8_t *backings,
                                                size_t backings_len,
                                                const uint8_t *projects,
                                                size_t projects_len,
                                                struct BuddynetGraph **out);

/**
 * # Safety
 * `graph` must be null or a handle from a `buddynet_graph_load_*` call that
 * has not been freed.
 */
void buddynet_graph_free(struct BuddynetGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle; `out` must be a valid pointer.
 */
enum BuddynetStatus buddynet_graph_counts(const struct BuddynetGraph *graph,
                                          struct BuddynetGraphCounts *out);

/**
 * # Safety
 * `graph` must be a live handle; `out` must be a valid pointer.
 */
enum BuddynetStatus buddynet_degree_summary(const struct BuddynetGraph *graph,
                                            enum BuddynetSide side,
                                            struct BuddynetDegreeSummary *out);

/**
 * # Safety
 * `graph` must be a live handle; `out` must be a valid pointer.
 */
enum BuddynetStatus buddynet_buddy_census(const struct BuddynetGraph *graph,
                                          bool exclude_founder_w,
                                          struct BuddynetCensusSummary *out);

/**
 * Runs the conditional uniform graph test.
 *
 * # Safety
 * `graph` must be a live handle; `options` and `out` must be valid pointers.
 */
enum BuddynetStatus buddynet_cug_test(const struct BuddynetGraph *graph,
                                      const struct BuddynetCugOptions *options,
                                      struct BuddynetCugResult **out);

/**
 * # Safety
 * `result` must be a live handle; `out` must be a valid pointer.
 */
enum BuddynetStatus buddynet_cug_result_summary(const struct BuddynetCugResult *result,
                                                struct BuddynetCugSummary *out);

/**
 * Copies the per-trial simulated ratios (in trial order) into `buf`.
 * `*needed` receives the trial count. Returns `BufferTooSmall` without
 * copying when `len` is smaller than that.
 *
 * # Safety
 * `result` must be a live handle; `buf` must point to `len` writable
 * doubles (or be null with `len == 0`); `needed` must be a valid pointer.
 */
enum BuddynetStatus buddynet_cug_result_simulated_ratios(const struct BuddynetCugResult *result,
                                                         double *buf,
                                                         size_t len,
                                                         size_t *needed);

/**
 * # Safety
 * `result` must be null or a handle from [`buddynet_cug_test`] that has not
 * been freed.
 */
void buddynet_cug_result_free(struct BuddynetCugResult *result);

/**
 * Full CUG result as a JSON string; free it with [`buddynet_string_free`].
 *
 * # Safety
 * `result` must be a live handle; `out` must be a valid pointer.
 */
enum BuddynetStatus buddynet_cug_result_json(const struct BuddynetCugResult *result, char **out);

/**
 * Validation report as JSON (`{findings: [...], ok}`); free it with
 * [`buddynet_string_free`].
 *
 * # Safety
 * `graph` must be a live handle; `out` must be a valid pointer.
 */
enum BuddynetStatus buddynet_validate_json(const struct BuddynetGraph *graph, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void buddynet_string_free(char *s);

/**
 * Rewiring probabilities `w_k / Σ w` for `n` candidate weights.
 *
 * # Safety
 * `weights` and `out` must each point to `n` elements.
 */
enum BuddynetStatus buddynet_choice_probabilities(const uint64_t *weights, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BUDDYNET_H */
