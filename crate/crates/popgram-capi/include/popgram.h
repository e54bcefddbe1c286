#ifndef POPGRAM_H
#define POPGRAM_H

/* Generated by cbindgen from popgram-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the library's error classes.
 */
typedef enum PopgramStatus {
  POPGRAM_STATUS_OK = 0,
  /**
   * Invalid configuration or parameters.
   */
  POPGRAM_STATUS_CONFIG_ERROR = 1,
  /**
   * Bad input data: unreadable corpus, corrupt artifact, unknown token.
   */
  POPGRAM_STATUS_DATA_ERROR = 2,
  /**
   * A required pointer argument was null.
   */
  POPGRAM_STATUS_NULL_ARGUMENT = 3,
  /**
   * A string argument was not valid UTF-8.
   */
  POPGRAM_STATUS_INVALID_UTF8 = 4,
  /**
   * Internal invariant failure.
   */
  POPGRAM_STATUS_INTERNAL = 5,
} PopgramStatus;

/**
 * Opaque engine handle.
 */
typedef struct PopgramEngine PopgramEngine;

/**
 * Build options. Zero-valued numeric fields fall back to the defaults
 * (window 2, n-gram range 2..=5); `lowercase` is taken literally;
 * `schedule` and `tau` may be null for the defaults
 * ("3/4,1/2,1/4,0" and "all").
 */
typedef struct PopgramOptions {
  uint32_t window;
  uint32_t ngram_min;
  uint32_t ngram_max;
  bool lowercase;
  const char *schedule;
  const char *tau;
} PopgramOptions;

/**
 * Engine counters for quick inspection.
 */
typedef struct PopgramInfo {
  uint64_t tokens;
  uint64_t patterns;
  uint64_t total_tokens;
  uint64_t levels;
} PopgramInfo;

/**
 * One judgment. `score_*` and `coverage_*` are exact rationals;
 * `level` is the generality level index, or -1 when unsupported.
 */
typedef struct PopgramJudgment {
  uint64_t score_num;
  uint64_t score_den;
  uint64_t coverage_num;
  uint64_t coverage_den;
  int64_t level;
  /**
   * Weighted size of the same-length attested population.
   */
  uint64_t population;
  /**
   * Number of argmax support locations.
   */
  uint64_t supports;
  /**
   * Two or more distinct patterns achieve the maximal score.
   */
  bool tie;
  /**
   * The candidate contains tokens outside the vocabulary.
   */
  bool oov;
} PopgramJudgment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *popgram_version(void);

/**
 * The last error message raised on this thread, or null. The caller owns
 * the returned string and must release it with `popgram_string_free`.
 */
char *popgram_last_error_message(void);

/**
 * # Safety
 * `s` must be a pointer previously returned by this library's string
 * functions, not yet freed.
 */
void popgram_string_free(char *s);

/**
 * Ingest a corpus file and build an engine.
 *
 * # Safety
 * `corpus_path` must be a valid NUL-terminated string; `options` must be
 * null or point to a valid `PopgramOptions`; `out` must be a valid
 * pointer. On success `*out` owns the engine.
 */
enum PopgramStatus popgram_engine_build(const char *corpus_path,
                                        const struct PopgramOptions *options,
                                        struct PopgramEngine **out);

/**
 * Load an engine from an index artifact.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 * On success `*out` owns the engine.
 */
enum PopgramStatus popgram_engine_load(const char *path, struct PopgramEngine **out);

/**
 * Write an engine to an index artifact (atomically).
 *
 * # Safety
 * `engine` must be a live handle from this library; `path` must be a valid
 * NUL-terminated string.
 */
enum PopgramStatus popgram_engine_save(const struct PopgramEngine *engine,
                                       const char *path,
                                       bool with_similarity_cache);

/**
 * Release an engine handle. Null is a no-op.
 *
 * # Safety
 * `engine` must be a handle from this library, not yet freed.
 */
void popgram_engine_free(struct PopgramEngine *engine);

/**
 * Basic counters for a live engine.
 *
 * # Safety
 * `engine` must be a live handle and `out` a valid pointer.
 */
enum PopgramStatus popgram_engine_info(const struct PopgramEngine *engine, struct PopgramInfo *out);

/**
 * Judge one whitespace-separated candidate sequence.
 *
 * # Safety
 * `engine` must be a live handle, `candidate` a valid NUL-terminated
 * string, `out` a valid pointer.
 */
enum PopgramStatus popgram_engine_score(const struct PopgramEngine *engine,
                                        const char *candidate,
                                        struct PopgramJudgment *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POPGRAM_H */
