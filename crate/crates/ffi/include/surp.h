#ifndef SURP_H
#define SURP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SurpStatus {
  SURP_STATUS_OK = 0,
  SURP_STATUS_NULL_POINTER = 1,
  SURP_STATUS_INVALID_ARGUMENT = 2,
  SURP_STATUS_DATA_ERROR = 3,
  SURP_STATUS_INVARIANT = 4,
  SURP_STATUS_PANIC = 5,
} SurpStatus;

/**
 * Result of [`surp_decode`].
 */
typedef struct SurpDecoded SurpDecoded;

/**
 * Result of [`surp_encode`].
 */
typedef struct SurpEncoded SurpEncoded;

/**
 * Encoder settings. Fill with [`surp_encode_options_default`] first.
 */
typedef struct SurpEncodeOptions {
  /**
   * A [`SurpVariant`] value.
   */
  uint32_t variant;
  /**
   * A [`SurpIndexCodec`] value.
   */
  uint32_t index_codec;
  /**
   * `ln n` when zero or negative.
   */
  double beta;
  /**
   * Estimated from the input when zero or negative.
   */
  double lambda0;
  uint64_t seed;
  /**
   * A [`SurpStopKind`] value.
   */
  uint32_t stop_kind;
  /**
   * Iteration count, sparsity or distortion, depending on `stop_kind`.
   */
  double stop_value;
} SurpEncodeOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *surp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *surp_version(void);

/**
 * Laplacian, raw indices, automatic β and λ₀, seed 0, 1000 iterations.
 *
 * # Safety
 * `opts` must be null or point to writable memory for one options struct.
 */
enum SurpStatus surp_encode_options_default(struct SurpEncodeOptions *opts);

/**
 * Encode `n` values as a single segment, without renormalizing them.
 *
 * # Safety
 * `values` must point to `n` readable doubles, `opts` to a valid options
 * struct (null selects the defaults) and `out` to writable storage for
 * one handle pointer.
 */
enum SurpStatus surp_encode(const double *values,
                            size_t n,
                            const struct SurpEncodeOptions *opts,
                            struct SurpEncoded **out);

/**
 * Container bytes of an encode.
 *
 * # Safety
 * `h` must be a live handle from [`surp_encode`]; `data` and `len` must be
 * writable.
 */
enum SurpStatus surp_encoded_bytes(const struct SurpEncoded *h, const uint8_t **data, size_t *len);

/**
 * The encoder's reconstruction, `n` doubles.
 *
 * # Safety
 * As for [`surp_encoded_bytes`].
 */
enum SurpStatus surp_encoded_reconstruction(const struct SurpEncoded *h,
                                            const double **data,
                                            size_t *len);

/**
 * Iterations and refreshes of an encode.
 *
 * # Safety
 * `h` must be a live handle; each output pointer may be null.
 */
enum SurpStatus surp_encoded_stats(const struct SurpEncoded *h,
                                   uint64_t *iterations,
                                   uint64_t *refreshes);

/**
 * # Safety
 * `h` must be null or a handle from [`surp_encode`] not yet freed.
 */
void surp_encoded_free(struct SurpEncoded *h);

/**
 * Decode a container.
 *
 * # Safety
 * `bytes` must point to `len` readable bytes and `out` to writable storage
 * for one handle pointer.
 */
enum SurpStatus surp_decode(const uint8_t *bytes, size_t len, struct SurpDecoded **out);

/**
 * Decoded values in the coded domain, `n` doubles.
 *
 * # Safety
 * `h` must be a live handle from [`surp_decode`]; `data` and `len` must be
 * writable.
 */
enum SurpStatus surp_decoded_values(const struct SurpDecoded *h, const double **data, size_t *len);

/**
 * Iterations replayed by the decoder.
 *
 * # Safety
 * `h` must be a live handle and `iterations` writable.
 */
enum SurpStatus surp_decoded_iterations(const struct SurpDecoded *h, uint64_t *iterations);

/**
 * # Safety
 * `h` must be null or a handle from [`surp_decode`] not yet freed.
 */
void surp_decoded_free(struct SurpDecoded *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SURP_H */
