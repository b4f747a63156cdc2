#ifndef THZ_ISAC_H
#define THZ_ISAC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ThzStatus {
  THZ_STATUS_OK = 0,
  THZ_STATUS_NULL_POINTER = 1,
  THZ_STATUS_INVALID_ARGUMENT = 2,
  THZ_STATUS_PRECONDITION = 3,
  THZ_STATUS_NUMERIC = 4,
  THZ_STATUS_BUFFER_TOO_SMALL = 5,
  THZ_STATUS_PANIC = 6,
} ThzStatus;

typedef enum ThzWaveformKind {
  THZ_WAVEFORM_KIND_OFDM = 0,
  THZ_WAVEFORM_KIND_DFTS_OFDM = 1,
  THZ_WAVEFORM_KIND_OTFS = 2,
  THZ_WAVEFORM_KIND_DFTS_OTFS = 3,
} ThzWaveformKind;

/**
 * Opaque modulated frame.
 */
typedef struct ThzFrame ThzFrame;

/**
 * Opaque waveform configuration.
 */
typedef struct ThzWaveform ThzWaveform;

/**
 * Waveform parameters. Fill with [`thz_waveform_default_params`] and
 * adjust.
 */
typedef struct ThzWaveformParams {
  enum ThzWaveformKind kind;
  size_t subcarriers;
  size_t symbols;
  double subcarrier_spacing_hz;
  double carrier_hz;
  size_t cp_len;
  /**
   * 4 or 16.
   */
  uint32_t qam_order;
} ThzWaveformParams;

typedef struct ThzComplex {
  double re;
  double im;
} ThzComplex;

typedef struct ThzSensingResult {
  double range_m;
  double velocity_mps;
  double peak_snr_db;
} ThzSensingResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *thz_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *thz_version(void);

/**
 * Default parameters: 0.3 THz carrier, 1.92 MHz spacing, cyclic prefix of
 * a quarter symbol, 4-QAM.
 *
 * # Safety
 * `out` must be null or point to writable memory for one
 * `ThzWaveformParams`.
 */
enum ThzStatus thz_waveform_default_params(enum ThzWaveformKind kind,
                                           size_t subcarriers,
                                           size_t symbols,
                                           struct ThzWaveformParams *out);

/**
 * Validates `params` and allocates a waveform handle.
 *
 * # Safety
 * `params` must be null or point to an initialized `ThzWaveformParams`;
 * `out` must be null or writable.
 */
enum ThzStatus thz_waveform_new(const struct ThzWaveformParams *params, struct ThzWaveform **out);

/**
 * # Safety
 * `wf` must be null or a handle from [`thz_waveform_new`] not yet freed.
 */
void thz_waveform_free(struct ThzWaveform *wf);

/**
 * Samples per frame including cyclic prefixes; 0 for a null handle.
 *
 * # Safety
 * `wf` must be null or a live handle.
 */
size_t thz_waveform_frame_len(const struct ThzWaveform *wf);

/**
 * Payload bits carried by one frame without pilots; 0 for a null handle.
 *
 * # Safety
 * `wf` must be null or a live handle.
 */
size_t thz_waveform_payload_bits(const struct ThzWaveform *wf);

/**
 * Modulates a frame of uniformly random payload bits drawn from `seed`.
 *
 * # Safety
 * `wf` must be null or a live handle; `out` must be null or writable.
 */
enum ThzStatus thz_modulate_random(const struct ThzWaveform *wf,
                                   uint64_t seed,
                                   struct ThzFrame **out);

/**
 * Modulates exactly [`thz_waveform_payload_bits`] bits, one bit (0 or 1)
 * per byte.
 *
 * # Safety
 * `wf` must be null or a live handle; `bits` must be null or readable for
 * `len` bytes; `out` must be null or writable.
 */
enum ThzStatus thz_modulate_bits(const struct ThzWaveform *wf,
                                 const uint8_t *bits,
                                 size_t len,
                                 struct ThzFrame **out);

/**
 * # Safety
 * `frame` must be null or a live frame handle.
 */
size_t thz_frame_len(const struct ThzFrame *frame);

/**
 * Copies the frame's time samples into `buf`, which must hold at least
 * [`thz_frame_len`] elements.
 *
 * # Safety
 * `frame` must be null or live; `buf` must be null or writable for
 * `capacity` elements.
 */
enum ThzStatus thz_frame_samples(const struct ThzFrame *frame,
                                 struct ThzComplex *buf,
                                 size_t capacity);

/**
 * # Safety
 * `frame` must be null or a handle not yet freed.
 */
void thz_frame_free(struct ThzFrame *frame);

/**
 * PAPR in dB of `len` samples after `oversample`× band-limited
 * interpolation.
 *
 * # Safety
 * `samples` must be null or readable for `len` elements; `out` must be
 * null or writable.
 */
enum ThzStatus thz_papr_db(const struct ThzComplex *samples,
                           size_t len,
                           size_t oversample,
                           double *out);

/**
 * One monostatic sensing trial against a point target with the
 * waveform's own estimator. Pass NaN for `snr_db` to disable noise.
 *
 * # Safety
 * `wf` must be null or a live handle; `out` must be null or writable.
 */
enum ThzStatus thz_sensing_trial(const struct ThzWaveform *wf,
                                 double range_m,
                                 double velocity_mps,
                                 double snr_db,
                                 uint64_t seed,
                                 struct ThzSensingResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THZ_ISAC_H */
