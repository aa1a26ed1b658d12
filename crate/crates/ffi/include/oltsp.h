#ifndef OLTSP_H
#define OLTSP_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum OltspStatus {
  OLTSP_STATUS_OK = 0,
  OLTSP_STATUS_NULL_POINTER = 1,
  OLTSP_STATUS_INVALID_UTF8 = 2,
  OLTSP_STATUS_PARSE = 3,
  OLTSP_STATUS_INVALID_INSTANCE = 4,
  OLTSP_STATUS_UNKNOWN_NAME = 5,
  OLTSP_STATUS_INCOMPATIBLE = 6,
  OLTSP_STATUS_SIMULATION = 7,
  OLTSP_STATUS_ORACLE = 8,
  OLTSP_STATUS_GENERATE = 9,
  OLTSP_STATUS_PANIC = 10,
} OltspStatus;

/**
 * A request sequence in a metric space.
 */
typedef struct OltspInstance OltspInstance;

/**
 * The result of one simulation.
 */
typedef struct OltspOutcome OltspOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *oltsp_last_error(void);

/**
 * Static name of a status code.
 */
const char *oltsp_status_name(enum OltspStatus status);

/**
 * Parses and validates an instance document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum OltspStatus oltsp_instance_from_json(const char *json, struct OltspInstance **out);

/**
 * Random instance of `n` requests. `kind` is one of semiline, line, ring,
 * star, general; `variant` is open or closed.
 *
 * # Safety
 * `kind` and `variant` must be NUL-terminated strings and `out` writable.
 */
enum OltspStatus oltsp_instance_generate(const char *kind,
                                         const char *variant,
                                         size_t n,
                                         uint64_t seed,
                                         double horizon,
                                         struct OltspInstance **out);

/**
 * Number of requests, 0 for null.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t oltsp_instance_len(const struct OltspInstance *inst);

/**
 * Canonical JSON text of the instance.
 *
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
enum OltspStatus oltsp_instance_to_json(const struct OltspInstance *inst, char **out);

/**
 * # Safety
 * `inst` must be null or a handle not yet freed.
 */
void oltsp_instance_free(struct OltspInstance *inst);

/**
 * Runs the named policy on the instance.
 *
 * # Safety
 * `inst` must be a live handle, `policy` a NUL-terminated string and `out`
 * writable.
 */
enum OltspStatus oltsp_simulate(const struct OltspInstance *inst,
                                const char *policy,
                                struct OltspOutcome **out);

/**
 * Completion time, NaN for null.
 *
 * # Safety
 * `outcome` must be null or a live handle.
 */
double oltsp_outcome_completion(const struct OltspOutcome *outcome);

/**
 * Trajectory and service times as JSON.
 *
 * # Safety
 * `outcome` must be a live handle and `out` writable.
 */
enum OltspStatus oltsp_outcome_to_json(const struct OltspOutcome *outcome, char **out);

/**
 * # Safety
 * `outcome` must be null or a handle not yet freed.
 */
void oltsp_outcome_free(struct OltspOutcome *outcome);

/**
 * Offline optimum makespan.
 *
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
enum OltspStatus oltsp_opt_makespan(const struct OltspInstance *inst, double *out);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void oltsp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OLTSP_H */
