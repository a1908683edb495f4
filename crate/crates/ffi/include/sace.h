#ifndef SACE_H
#define SACE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdint.h>

/**
 * Result of every fallible call.
 */
typedef enum SaceStatus {
  SACE_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SACE_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  SACE_STATUS_INVALID_UTF8 = 2,
  /**
   * The project directory or its manifest could not be read.
   */
  SACE_STATUS_NOT_FOUND = 3,
  /**
   * A document or argument could not be parsed.
   */
  SACE_STATUS_PARSE_ERROR = 4,
  /**
   * The input parsed but was rejected.
   */
  SACE_STATUS_INVALID_INPUT = 5,
  /**
   * An unexpected internal failure, including a caught panic.
   */
  SACE_STATUS_INTERNAL = 6,
} SaceStatus;

/**
 * An opened project. Only ever handled through a pointer.
 */
typedef struct SaceProject SaceProject;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Opens the project rooted at `root` (a directory holding `sace.json`).
 *
 * # Safety
 * `root` must be a valid NUL-terminated string and `out` a valid pointer.
 * The handle written to `*out` must be released with [`sace_project_free`].
 */
enum SaceStatus sace_project_open(const char *root, struct SaceProject **out);

/**
 * Releases a project handle. Null is ignored.
 *
 * # Safety
 * `project` must come from [`sace_project_open`] and not be used afterwards.
 */
void sace_project_free(struct SaceProject *project);

/**
 * Lint findings as a JSON array of `{code, severity, locus, message}`.
 *
 * # Safety
 * `project` must be a live handle and `out` a valid pointer.
 */
enum SaceStatus sace_project_lint_json(const struct SaceProject *project, char **out);

/**
 * The assembled assurance case as Graphviz DOT text.
 *
 * # Safety
 * `project` must be a live handle and `out` a valid pointer.
 */
enum SaceStatus sace_project_assemble_dot(const struct SaceProject *project, char **out);

/**
 * Readiness of one process stage. Pass a negative `tier` for stages that
 * are not tier-indexed.
 *
 * # Safety
 * `project` must be a live handle and `out` a valid pointer.
 */
enum SaceStatus sace_project_stage_readiness_json(const struct SaceProject *project,
                                                  uint8_t stage,
                                                  int32_t tier,
                                                  char **out);

/**
 * Hazardous scenarios derived from the project's decision points.
 *
 * # Safety
 * `project` must be a live handle and `out` a valid pointer.
 */
enum SaceStatus sace_project_hazards_json(const struct SaceProject *project, char **out);

/**
 * Classified decision tables and scenarios for a `decisions.json` document
 * given as text. The result is `{"tables": [...], "scenarios": [...]}`.
 *
 * # Safety
 * `decisions` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SaceStatus sace_enumerate_json(const char *decisions, char **out);

/**
 * Parses one structured requirement into its clauses and template.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SaceStatus sace_requirement_parse_json(const char *text, char **out);

/**
 * Runs a boundary recognizer (JSON) over a `t,value,truth_inside` CSV trace
 * and returns the trace metrics.
 *
 * # Safety
 * `spec` and `csv` must be valid NUL-terminated strings and `out` a valid
 * pointer.
 */
enum SaceStatus sace_boundary_eval_json(const char *spec, const char *csv, char **out);

/**
 * A built-in argument pattern, by name (`N-SOC`) or artifact letter (`N`).
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SaceStatus sace_pattern_json(const char *name, char **out);

/**
 * Message for the last failed call on this thread, or null after a
 * successful call. The pointer stays valid until the next call on the
 * same thread.
 */
const char *sace_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void sace_string_free(char *s);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sace_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SACE_H */
