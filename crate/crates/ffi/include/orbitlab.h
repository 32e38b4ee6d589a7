#ifndef ORBITLAB_H
#define ORBITLAB_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OrbitlabMode {
  ORBITLAB_MODE_EXHAUSTIVE = 0,
  ORBITLAB_MODE_SAMPLED = 1,
} OrbitlabMode;

typedef enum OrbitlabStatus {
  ORBITLAB_STATUS_OK = 0,
  ORBITLAB_STATUS_NULL_ARGUMENT = 1,
  ORBITLAB_STATUS_INVALID_UTF8 = 2,
  ORBITLAB_STATUS_INVALID_RATIONAL = 3,
  /**
   * Schema, metric-axiom, bijection or relation failure while building an instance.
   */
  ORBITLAB_STATUS_INVALID_INSTANCE = 4,
  ORBITLAB_STATUS_INVALID_ARGUMENT = 5,
  /**
   * Enumeration cap, sampling saturation or unsaturated orbit.
   */
  ORBITLAB_STATUS_COMPUTATION = 6,
  ORBITLAB_STATUS_BUFFER_TOO_SMALL = 7,
  ORBITLAB_STATUS_IO = 8,
  ORBITLAB_STATUS_PANIC = 9,
} OrbitlabStatus;

/**
 * Opaque instance handle.
 */
typedef struct OrbitlabInstance OrbitlabInstance;

/**
 * Scale and perturbation source. `epsilon` and `delta` are `"p/q"` strings;
 * `seed` and `count` are read only in sampled mode.
 */
typedef struct OrbitlabScale {
  const char *epsilon;
  const char *delta;
  size_t radius;
  enum OrbitlabMode mode;
  uint64_t seed;
  size_t count;
} OrbitlabScale;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads an instance file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum OrbitlabStatus orbitlab_instance_load(const char *path, struct OrbitlabInstance **out);

/**
 * Parses an instance from JSON text.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum OrbitlabStatus orbitlab_instance_from_json(const char *json, struct OrbitlabInstance **out);

/**
 * Builds a named fixture: `"L3"` or `"C6"`.
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum OrbitlabStatus orbitlab_instance_named(const char *name, struct OrbitlabInstance **out);

/**
 * Builds the periodic-core example with period `t` and depth `k`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum OrbitlabStatus orbitlab_instance_periodic_core(size_t t,
                                                    size_t k,
                                                    struct OrbitlabInstance **out);

/**
 * Releases an instance. Null is ignored.
 *
 * # Safety
 * `inst` must be null or a handle from this library not yet freed.
 */
void orbitlab_instance_free(struct OrbitlabInstance *inst);

/**
 * Number of points, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t orbitlab_instance_point_count(const struct OrbitlabInstance *inst);

/**
 * Writes the persistent points, ascending, into `buf`. `*len` receives the
 * set size even when the buffer is too small.
 *
 * # Safety
 * `inst` and `scale` must be valid; `buf` must hold `cap` elements.
 */
enum OrbitlabStatus orbitlab_persistent_points(const struct OrbitlabInstance *inst,
                                               const struct OrbitlabScale *scale,
                                               size_t *buf,
                                               size_t cap,
                                               size_t *len);

/**
 * Writes the topologically stable points, ascending, into `buf`.
 *
 * # Safety
 * As for [`orbitlab_persistent_points`].
 */
enum OrbitlabStatus orbitlab_stable_points(const struct OrbitlabInstance *inst,
                                           const struct OrbitlabScale *scale,
                                           size_t *buf,
                                           size_t cap,
                                           size_t *len);

/**
 * Runs the verification suite. `*report` receives the JSON report, to be
 * released with [`orbitlab_string_free`]; `*all_passed` is 1 when no check
 * failed and 0 otherwise.
 *
 * # Safety
 * `inst` and `scale` must be valid; `report` and `all_passed` must be valid pointers.
 */
enum OrbitlabStatus orbitlab_verify(const struct OrbitlabInstance *inst,
                                    const struct OrbitlabScale *scale,
                                    size_t trials,
                                    char **report,
                                    int *all_passed);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void orbitlab_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into the library on the same thread.
 */
const char *orbitlab_last_error(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ORBITLAB_H */
