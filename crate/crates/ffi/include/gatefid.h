/* Generated by cbindgen; do not edit. */

#ifndef GATEFID_H
#define GATEFID_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GfStatus {
  GF_STATUS_OK = 0,
  GF_STATUS_NULL_POINTER = 1,
  GF_STATUS_DIMENSION_MISMATCH = 2,
  GF_STATUS_NON_FINITE = 3,
  GF_STATUS_NOT_HERMITIAN = 4,
  GF_STATUS_NOT_SYMMETRIC = 5,
  GF_STATUS_NOT_PSD = 6,
  GF_STATUS_INVALID_CHANNEL = 7,
  GF_STATUS_INVALID_STATE = 8,
  GF_STATUS_INVALID_ARGUMENT = 9,
  GF_STATUS_PATTERN_VIOLATION = 10,
  GF_STATUS_NON_CONVERGENCE = 11,
  GF_STATUS_BREAKDOWN = 12,
  GF_STATUS_PARSE = 13,
  GF_STATUS_IO = 14,
  GF_STATUS_PANIC = 15,
} GfStatus;

typedef enum GfMethod {
  GF_METHOD_SDP_EXACT = 0,
  GF_METHOD_PPT_AND_SEESAW = 1,
  GF_METHOD_GRID = 2,
} GfMethod;

/**
 * Opaque channel handle.
 */
typedef struct GfChoi GfChoi;

typedef struct GfValidation {
  bool cp;
  bool tp;
  bool unital;
  double min_eigenvalue;
} GfValidation;

typedef struct GfFidelityReport {
  double average;
  double lambda1;
  double minimum;
  double interval_lower;
  double interval_upper;
  /**
   * Method actually used (`SdpExact` falls back for `n ≥ 3`).
   */
  enum GfMethod method;
} GfFidelityReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gf_last_error_message(void);

/**
 * Builds a channel on `C^n` from its `n² × n²` Choi matrix given as
 * row-major real and imaginary parts. `im` may be NULL for a real matrix.
 *
 * # Safety
 * `re` (and `im` if non-null) must point to `n⁴` doubles; `out` must be
 * writable.
 */
enum GfStatus gf_choi_from_matrix(size_t n,
                                  const double *re,
                                  const double *im,
                                  struct GfChoi **out_choi);

/**
 * Reads a channel in the `CHOI n` text format.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum GfStatus gf_choi_read_file(const char *path, struct GfChoi **out_choi);

/**
 * # Safety
 * `choi` must be a live handle and `path` a NUL-terminated string.
 */
enum GfStatus gf_choi_write_file(const struct GfChoi *choi, const char *path);

/**
 * Draws a random channel on `C^n` (Kraus rank `n`) from stream `stream`
 * of `seed`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GfStatus gf_random_channel(size_t n, uint64_t seed, uint64_t stream, struct GfChoi **out_choi);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `choi` must be NULL or a handle not yet freed.
 */
void gf_choi_free(struct GfChoi *choi);

/**
 * Local dimension `n`, or 0 for NULL.
 *
 * # Safety
 * `choi` must be NULL or a live handle.
 */
size_t gf_choi_dim(const struct GfChoi *choi);

/**
 * Copies the Choi matrix out, row-major. Either buffer may be NULL.
 *
 * # Safety
 * Non-null buffers must hold `n⁴` doubles.
 */
enum GfStatus gf_choi_entries(const struct GfChoi *choi, double *re, double *im);

/**
 * # Safety
 * `choi` must be a live handle; `report` must be writable.
 */
enum GfStatus gf_validate(const struct GfChoi *choi, double tol, struct GfValidation *report);

/**
 * # Safety
 * `choi` must be a live handle; `value` must be writable.
 */
enum GfStatus gf_average_fidelity(const struct GfChoi *choi, double *value);

/**
 * Minimum gate fidelity with a certified interval. `tol` is the target
 * SDP gap; `seed` drives see-saw restarts.
 *
 * # Safety
 * `choi` must be a live handle; `report` must be writable.
 */
enum GfStatus gf_min_gate_fidelity(const struct GfChoi *choi,
                                   enum GfMethod method,
                                   double tol,
                                   uint64_t seed,
                                   struct GfFidelityReport *report);

/**
 * # Safety
 * `a`, `b` must be live handles; `equal` must be writable.
 */
enum GfStatus gf_equal_fidelity(const struct GfChoi *a,
                                const struct GfChoi *b,
                                double tol,
                                bool *equal);

/**
 * Sets `*is_constant` and, when true, `*value` to the constant fidelity.
 *
 * # Safety
 * `choi` must be a live handle; `is_constant` must be writable; `value`
 * may be NULL.
 */
enum GfStatus gf_constant_fidelity(const struct GfChoi *choi,
                                   double tol,
                                   bool *is_constant,
                                   double *value);

/**
 * Gate fidelity at the pure state with amplitudes `re + i·im` (length `n`,
 * normalized internally). `im` may be NULL.
 *
 * # Safety
 * `choi` must be a live handle; `re` (and non-null `im`) must hold `len`
 * doubles; `value` must be writable.
 */
enum GfStatus gf_gate_fidelity_at(const struct GfChoi *choi,
                                  const double *re,
                                  const double *im,
                                  size_t len,
                                  double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GATEFID_H */
