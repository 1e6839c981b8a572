#ifndef FTLR_H
#define FTLR_H

/* Generated by cbindgen from the ftlr-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every API call.
 */
typedef enum FtlrStatus {
  FTLR_STATUS_OK = 0,
  FTLR_STATUS_NULL_ARGUMENT = 1,
  FTLR_STATUS_INVALID_ARGUMENT = 2,
  FTLR_STATUS_INVALID_FRAME = 3,
  FTLR_STATUS_TRACKER_ERROR = 4,
  FTLR_STATUS_PANIC = 5,
} FtlrStatus;

/**
 * Opaque tracker handle.
 */
typedef struct FtlrTracker FtlrTracker;

/**
 * Axis-aligned box in frame pixels; `x`/`y` is the top-left corner.
 */
typedef struct FtlrBox {
  double x;
  double y;
  double w;
  double h;
} FtlrBox;

/**
 * Outcome of one tracking step.
 */
typedef struct FtlrStepResult {
  struct FtlrBox bbox;
  /**
   * 1 when the confidence gate accepted the correlation peak.
   */
  uint8_t confident;
  /**
   * Peak ratio the decision was made on; infinity when no second peak
   * exists, 0 when the response was degenerate.
   */
  double ratio;
  /**
   * 1 when the backup tracker supplied the box.
   */
  uint8_t used_backup;
} FtlrStepResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next API call on the same thread.
 */
const char *ftlr_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ftlr_version(void);

/**
 * Creates a tracker from the first frame (8-bit grayscale, row-major) and
 * the initial box. `config_text` may be null for defaults, or hold the same
 * `key=value` lines the CLI accepts (one per line, `\n`-separated).
 *
 * # Safety
 * `pixels` must point to `width * height` readable bytes; `out_tracker`
 * must be a valid pointer. The returned handle must be released with
 * [`ftlr_tracker_free`].
 */
enum FtlrStatus ftlr_tracker_new(const uint8_t *pixels,
                                 uint32_t width,
                                 uint32_t height,
                                 struct FtlrBox init_box,
                                 const char *config_text,
                                 struct FtlrTracker **out_tracker);

/**
 * Advances the tracker by one frame.
 *
 * # Safety
 * `tracker` must come from [`ftlr_tracker_new`] and not be freed; `pixels`
 * must point to `width * height` readable bytes; `out_result` must be valid.
 */
enum FtlrStatus ftlr_tracker_step(struct FtlrTracker *tracker,
                                  const uint8_t *pixels,
                                  uint32_t width,
                                  uint32_t height,
                                  struct FtlrStepResult *out_result);

/**
 * Advances one frame supplying ground truth, required by the `ftlr_gt`
 * variant.
 *
 * # Safety
 * Same contract as [`ftlr_tracker_step`].
 */
enum FtlrStatus ftlr_tracker_step_with_gt(struct FtlrTracker *tracker,
                                          const uint8_t *pixels,
                                          uint32_t width,
                                          uint32_t height,
                                          struct FtlrBox gt,
                                          struct FtlrStepResult *out_result);

/**
 * Current variant name of a live tracker, as a static string.
 *
 * # Safety
 * `tracker` must be a live handle from [`ftlr_tracker_new`].
 */
const char *ftlr_tracker_variant(const struct FtlrTracker *tracker);

/**
 * Releases a tracker handle. Passing null is a no-op.
 *
 * # Safety
 * `tracker` must come from [`ftlr_tracker_new`] and must not be used after
 * this call.
 */
void ftlr_tracker_free(struct FtlrTracker *tracker);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FTLR_H */
