#ifndef CFR_H
#define CFR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CfrStatus {
  CFR_STATUS_OK = 0,
  CFR_STATUS_NULL_ARGUMENT = 1,
  CFR_STATUS_INVALID_UTF8 = 2,
  CFR_STATUS_PARSE = 3,
  CFR_STATUS_INVALID = 4,
  CFR_STATUS_RUNTIME = 5,
  CFR_STATUS_PANIC = 6,
} CfrStatus;

typedef enum CfrOutcome {
  CFR_OUTCOME_SUCCESS = 0,
  CFR_OUTCOME_FAILURE = 1,
  CFR_OUTCOME_BUDGET_EXHAUSTED = 2,
} CfrOutcome;

typedef struct CfrProgram CfrProgram;

typedef struct CfrProperties CfrProperties;

typedef struct CfrResidual CfrResidual;

/**
 * Result of [`cfr_run`].
 */
typedef struct CfrRunResult {
  enum CfrOutcome outcome;
  /**
   * Number of calls made, including those undone by backtracking.
   */
  uint64_t steps;
  /**
   * Whether every recorded call's properties hold at its values.
   */
  bool properties_sound;
} CfrRunResult;

/**
 * Result of [`cfr_check_equiv`].
 */
typedef struct CfrEquivReport {
  uint64_t trials;
  uint64_t agreements;
  uint64_t disagreements;
  uint64_t budget_exhausted;
} CfrEquivReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *cfr_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void cfr_string_free(char *s);

/**
 * Parse a program in clause syntax.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out_program` a valid pointer.
 */
enum CfrStatus cfr_program_parse(const char *source, struct CfrProgram **out_program);

/**
 * # Safety
 * `program` must be a live handle and `out_text` a valid pointer.
 */
enum CfrStatus cfr_program_print(const struct CfrProgram *program, char **out_text);

/**
 * # Safety
 * `program` must be NULL or a handle from this library, not yet freed.
 */
void cfr_program_free(struct CfrProgram *program);

/**
 * Properties read off the clause guards of `program`.
 *
 * # Safety
 * `program` must be a live handle and `out_props` a valid pointer.
 */
enum CfrStatus cfr_properties_derive(const struct CfrProgram *program,
                                     struct CfrProperties **out_props);

/**
 * Parse a properties file for the predicates of `program`.
 *
 * # Safety
 * `source` must be a NUL-terminated string, `program` a live handle and
 * `out_props` a valid pointer.
 */
enum CfrStatus cfr_properties_parse(const char *source,
                                    const struct CfrProgram *program,
                                    struct CfrProperties **out_props);

/**
 * # Safety
 * `props` must be a live handle and `out_text` a valid pointer.
 */
enum CfrStatus cfr_properties_print(const struct CfrProperties *props, char **out_text);

/**
 * # Safety
 * `props` must be NULL or a handle from this library, not yet freed.
 */
void cfr_properties_free(struct CfrProperties *props);

/**
 * Refine `program` from the entry predicate `entry`. `prefix` may be NULL
 * for the default `solve__`.
 *
 * # Safety
 * Handles must be live, strings NUL-terminated (or `prefix` NULL) and
 * `out_residual` a valid pointer.
 */
enum CfrStatus cfr_refine(const struct CfrProgram *program,
                          const struct CfrProperties *props,
                          const char *entry,
                          const char *prefix,
                          bool strengthen,
                          struct CfrResidual **out_residual);

/**
 * The refined program in clause syntax.
 *
 * # Safety
 * `residual` must be a live handle and `out_text` a valid pointer.
 */
enum CfrStatus cfr_residual_emit(const struct CfrResidual *residual, char **out_text);

/**
 * Number of versions, or 0 for a NULL handle.
 *
 * # Safety
 * `residual` must be NULL or a live handle.
 */
size_t cfr_residual_version_count(const struct CfrResidual *residual);

/**
 * Name of the entry version.
 *
 * # Safety
 * `residual` must be a live handle and `out_name` a valid pointer.
 */
enum CfrStatus cfr_residual_entry_name(const struct CfrResidual *residual, char **out_name);

/**
 * # Safety
 * `residual` must be NULL or a handle from this library, not yet freed.
 */
void cfr_residual_free(struct CfrResidual *residual);

/**
 * Run the ground goal `goal` (e.g. `"while0(5,3,10)"`) for at most
 * `max_steps` calls.
 *
 * # Safety
 * Handles must be live, `goal` NUL-terminated and `out_result` valid.
 */
enum CfrStatus cfr_run(const struct CfrProgram *program,
                       const struct CfrProperties *props,
                       const char *goal,
                       uint64_t max_steps,
                       struct CfrRunResult *out_result);

/**
 * Compare `original` from `entry` against `refined` from `entry_version`
 * on `trials` goals with integer arguments in `[lo, hi]` drawn from `seed`.
 *
 * # Safety
 * Handles must be live, strings NUL-terminated and `out_report` valid.
 */
enum CfrStatus cfr_check_equiv(const struct CfrProgram *original,
                               const struct CfrProgram *refined,
                               const struct CfrProperties *props,
                               const char *entry,
                               const char *entry_version,
                               uint64_t trials,
                               int64_t lo,
                               int64_t hi,
                               uint64_t seed,
                               uint64_t max_steps,
                               struct CfrEquivReport *out_report);

/**
 * Copy of a residual program as a plain program handle, e.g. to pass to
 * [`cfr_check_equiv`] or [`cfr_run`].
 *
 * # Safety
 * `residual` must be a live handle and `out_program` a valid pointer.
 */
enum CfrStatus cfr_residual_program(const struct CfrResidual *residual,
                                    struct CfrProgram **out_program);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CFR_H */
