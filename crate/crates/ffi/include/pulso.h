#ifndef PULSO_H
#define PULSO_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum PulsoStatus {
  PULSO_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  PULSO_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  PULSO_STATUS_INVALID_UTF8 = 2,
  /**
   * A file could not be read or written.
   */
  PULSO_STATUS_IO = 3,
  /**
   * An input file or value was malformed.
   */
  PULSO_STATUS_PARSE = 4,
  /**
   * Arguments were well-formed but not acceptable (e.g. too few points).
   */
  PULSO_STATUS_INVALID_ARGUMENT = 5,
  /**
   * No record survived filtering.
   */
  PULSO_STATUS_EMPTY_CORPUS = 6,
  /**
   * The requested quantity is undefined for this input (e.g. shares of
   * an aggregate without positive candidate tweets).
   */
  PULSO_STATUS_UNDEFINED = 7,
  /**
   * An internal panic was caught.
   */
  PULSO_STATUS_PANIC = 99,
} PulsoStatus;

/**
 * Candidate attribution of a tweet.
 */
typedef enum PulsoCandidate {
  PULSO_CANDIDATE_MACRI = 0,
  PULSO_CANDIDATE_SCIOLI = 1,
  PULSO_CANDIDATE_BOTH = 2,
  PULSO_CANDIDATE_NONE = 3,
} PulsoCandidate;

/**
 * Mergeable aggregate counters.
 */
typedef struct PulsoAggregate PulsoAggregate;

/**
 * Loaded sentiment dictionaries.
 */
typedef struct PulsoLexicon PulsoLexicon;

/**
 * Ordered location rules.
 */
typedef struct PulsoLocationRules PulsoLocationRules;

/**
 * National positive-tweet shares.
 */
typedef struct PulsoShares {
  uint64_t n_macri;
  uint64_t n_scioli;
  double pct_macri;
  double pct_scioli;
} PulsoShares;

/**
 * Pearson correlation with its two-sided p-value.
 */
typedef struct PulsoCorrelation {
  double r;
  double p_value;
  size_t n;
  /**
   * True for an exact linear relation (|r| = 1, p = 0).
   */
  bool degenerate;
} PulsoCorrelation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread; do not free it.
 */
const char *pulso_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void pulso_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *pulso_version(void);

/**
 * Loads white_list.txt, normalization.tsv, pos_words.txt and neg_words.txt
 * from `dir`.
 *
 * # Safety
 * `dir` must be a NUL-terminated string; `out` must be writable.
 */
enum PulsoStatus pulso_lexicon_load(const char *dir, struct PulsoLexicon **out);

/**
 * # Safety
 * `lexicon` must be NULL or a handle from [`pulso_lexicon_load`].
 */
void pulso_lexicon_free(struct PulsoLexicon *lexicon);

/**
 * Scores `text` sentence by sentence with default tokenizer options.
 * Writes the sum of sentence scores to `out_total` and the tweet label
 * (-1, 0 or 1) to `out_label`; either may be NULL. `out_sentences`, if not
 * NULL, receives the number of sentences.
 *
 * # Safety
 * Pointers must be valid; `text` NUL-terminated.
 */
enum PulsoStatus pulso_analyze_text(const struct PulsoLexicon *lexicon,
                                    const char *text,
                                    int64_t *out_total,
                                    int32_t *out_label,
                                    size_t *out_sentences);

/**
 * Candidate named by `text`.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` writable.
 */
enum PulsoStatus pulso_classify_candidate(const char *text, enum PulsoCandidate *out);

/**
 * Loads tab-separated location rules from `path`.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` writable.
 */
enum PulsoStatus pulso_rules_load(const char *path, struct PulsoLocationRules **out);

/**
 * # Safety
 * `rules` must be NULL or a handle from [`pulso_rules_load`].
 */
void pulso_rules_free(struct PulsoLocationRules *rules);

/**
 * Maps a free-text location to (province, country). Unmatched input yields
 * ("Sin Provincia", "Sin País"). Both out strings must be released with
 * [`pulso_string_free`].
 *
 * # Safety
 * Pointers must be valid; `raw` NUL-terminated.
 */
enum PulsoStatus pulso_normalize_location(const struct PulsoLocationRules *rules,
                                          const char *raw,
                                          char **out_province,
                                          char **out_country);

/**
 * Empty aggregate. Never returns NULL.
 */
struct PulsoAggregate *pulso_aggregate_new(void);

/**
 * # Safety
 * `agg` must be NULL or a handle from this library.
 */
void pulso_aggregate_free(struct PulsoAggregate *agg);

/**
 * Counts one labelled tweet. `candidate` is a `PulsoCandidate` value and
 * `sentiment` is -1, 0 or 1.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum PulsoStatus pulso_aggregate_fold(struct PulsoAggregate *agg,
                                      const char *country,
                                      const char *province,
                                      int32_t candidate,
                                      int32_t sentiment);

/**
 * Adds every count of `src` into `dst`. `src` is left unchanged.
 *
 * # Safety
 * Both handles must be valid and distinct.
 */
enum PulsoStatus pulso_aggregate_merge(struct PulsoAggregate *dst,
                                       const struct PulsoAggregate *src);

/**
 * Number of tweets counted, or 0 for NULL.
 *
 * # Safety
 * `agg` must be NULL or a valid handle.
 */
uint64_t pulso_aggregate_total(const struct PulsoAggregate *agg);

/**
 * Shares of positive tweets naming only Macri or only Scioli.
 * Returns `PULSO_STATUS_UNDEFINED` when there are none.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PulsoStatus pulso_aggregate_national_shares(const struct PulsoAggregate *agg,
                                                 struct PulsoShares *out);

/**
 * Reads an aggregate CSV (country,province,candidate,sentiment,count).
 *
 * # Safety
 * `path` NUL-terminated; `out` writable.
 */
enum PulsoStatus pulso_aggregate_read_csv(const char *path, struct PulsoAggregate **out);

/**
 * Writes the aggregate as CSV in canonical order.
 *
 * # Safety
 * `agg` valid; `path` NUL-terminated.
 */
enum PulsoStatus pulso_aggregate_write_csv(const struct PulsoAggregate *agg, const char *path);

/**
 * Pearson correlation coefficient of two series of length `len`.
 *
 * # Safety
 * `x` and `y` must point to `len` doubles; `out` writable.
 */
enum PulsoStatus pulso_pearson(const double *x, const double *y, size_t len, double *out);

/**
 * Pearson r with a two-sided t-test p-value on `len - 2` degrees of
 * freedom. Requires at least three points.
 *
 * # Safety
 * `x` and `y` must point to `len` doubles; `out` writable.
 */
enum PulsoStatus pulso_correlation_test(const double *x,
                                        const double *y,
                                        size_t len,
                                        struct PulsoCorrelation *out);

/**
 * Replays `corpus` with the default campaign filter and writes every
 * report file into `out_dir`. `threads` of 0 means 1.
 *
 * # Safety
 * All strings must be NUL-terminated.
 */
enum PulsoStatus pulso_run_pipeline(const char *corpus,
                                    const char *lexicon_dir,
                                    const char *locations,
                                    const char *official,
                                    const char *out_dir,
                                    size_t threads);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PULSO_H */
