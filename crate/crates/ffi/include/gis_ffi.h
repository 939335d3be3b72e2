#ifndef GIS_FFI_H
#define GIS_FFI_H

/* Generated by cbindgen from the gis-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum GisStatus {
  /**
   * Success.
   */
  GisStatus_Ok = 0,
  /**
   * A network document parsed but failed verification.
   */
  GisStatus_VerificationFailed = 1,
  /**
   * A pointer argument was null or a value was malformed.
   */
  GisStatus_InvalidArgument = 2,
  /**
   * The inputs were well-formed but mathematically inadmissible
   * (degenerate seed, segment outside an orbit, modulus mismatch).
   */
  GisStatus_DomainError = 3,
  /**
   * Text input could not be parsed.
   */
  GisStatus_ParseError = 4,
  /**
   * The output buffer is too small.
   */
  GisStatus_BufferTooSmall = 5,
  /**
   * An internal invariant failed; this is a library bug.
   */
  GisStatus_InternalError = 6,
} GisStatus;

/**
 * An opaque handle to the `T/I`-orbit of a seed segment, together with the
 * contextual-operation context needed to evaluate expressions on it.
 */
typedef struct GisOrbit GisOrbit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *gis_version(void);

/**
 * Build the `T/I`-orbit of `seed` (text such as `0,4,7`) mod `modulus` and
 * store a handle in `out`. The handle must be released with
 * `gis_orbit_free`.
 *
 * # Safety
 * `seed` must be null or point to a NUL-terminated string; `out` must be a
 * valid pointer to pointer.
 */
enum GisStatus gis_orbit_new(uint32_t modulus, const char *seed, struct GisOrbit **out);

/**
 * Release an orbit handle. Null is ignored.
 *
 * # Safety
 * `orbit` must be null or a pointer previously returned by
 * `gis_orbit_new` that has not been freed.
 */
void gis_orbit_free(struct GisOrbit *orbit);

/**
 * Number of segments in the orbit; 0 for a null handle.
 *
 * # Safety
 * `orbit` must be null or a live handle.
 */
size_t gis_orbit_size(const struct GisOrbit *orbit);

/**
 * Evaluate an operation expression (grammar as in the network format, e.g.
 * `(13)*R`, `Q3`, `aff(7,7)`) at `segment` in the orbit context, writing
 * the image as text into `buf`.
 *
 * # Safety
 * `orbit` must be a live handle; `op` and `segment` NUL-terminated strings;
 * `buf` must point to `buf_len` writable bytes.
 */
enum GisStatus gis_orbit_apply(const struct GisOrbit *orbit,
                               const char *op,
                               const char *segment,
                               char *buf,
                               size_t buf_len);

/**
 * Retrograde inversion enchaining of a bare segment, written into `buf`.
 *
 * # Safety
 * `segment` must be a NUL-terminated string; `buf` must point to `buf_len`
 * writable bytes.
 */
enum GisStatus gis_rich(uint32_t modulus, const char *segment, char *buf, size_t buf_len);

/**
 * Parse and verify a network document given as JSON text. Returns `Ok` when
 * every edge and square passes, `VerificationFailed` when some check fails,
 * and a parse/domain status when the document is malformed.
 *
 * # Safety
 * `json` must be null or a NUL-terminated string.
 */
enum GisStatus gis_network_verify(const char *json);

/**
 * Render a network document as DOT. On success `*out` owns a NUL-terminated
 * string to be released with `gis_string_free`.
 *
 * # Safety
 * `json` must be null or a NUL-terminated string; `out` must be a valid
 * pointer to pointer.
 */
enum GisStatus gis_network_to_dot(const char *json, char **out);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `text` must be null or a pointer returned by `gis_network_to_dot` that
 * has not been freed.
 */
void gis_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GIS_FFI_H */
