#ifndef VERIPHOTON_H
#define VERIPHOTON_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes.
 */
typedef enum VpStatus {
  VP_STATUS_OK = 0,
  VP_STATUS_NULL_POINTER = 1,
  VP_STATUS_INVALID_UTF8 = 2,
  VP_STATUS_PARSE_ERROR = 3,
  VP_STATUS_INVALID_ARGUMENT = 4,
  VP_STATUS_PANIC = 5,
} VpStatus;

/**
 * Opaque problem instance.
 */
typedef struct VpInstance VpInstance;

/**
 * Acceptance estimate with a 99% confidence half-width.
 */
typedef struct VpEstimate {
  uint64_t trials;
  uint64_t accepts;
  double estimate;
  double half_width;
} VpEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *vp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *vp_version(void);

/**
 * Parses an instance document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum VpStatus vp_instance_from_json(const char *json, struct VpInstance **out);

/**
 * Releases an instance. Null is ignored.
 *
 * # Safety
 * `inst` must come from [`vp_instance_from_json`] and not be used afterwards.
 */
void vp_instance_free(struct VpInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
enum VpStatus vp_instance_n_qubits(const struct VpInstance *inst, size_t *out);

/**
 * Smallest eigenvalue of the instance Hamiltonian.
 *
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
enum VpStatus vp_ground_energy(const struct VpInstance *inst, double *out);

/**
 * Exact honest acceptance probability of the qubit protocol.
 *
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
enum VpStatus vp_exact_pacc_honest(const struct VpInstance *inst, double *out);

/**
 * Monte Carlo acceptance estimate of the photonic protocol. A null
 * `adversary_json` selects the honest prover.
 *
 * # Safety
 * `inst` must be a live handle, `adversary_json` null or NUL-terminated, and
 * `out` writable.
 */
enum VpStatus vp_estimate_pacc(const struct VpInstance *inst,
                               const char *adversary_json,
                               size_t m,
                               double alpha,
                               size_t trials,
                               uint64_t seed,
                               struct VpEstimate *out);

/**
 * # Safety
 * Out-pointers must be writable.
 */
enum VpStatus vp_recommended_params(size_t n, double f, size_t *out_m, double *out_alpha);

/**
 * # Safety
 * `out` must be writable.
 */
enum VpStatus vp_gap_lower_bound(size_t n, double f, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum VpStatus vp_required_r(size_t m, size_t n, double f, size_t *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum VpStatus vp_f_min(size_t m, size_t n, size_t r, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum VpStatus vp_fidelity_series(size_t r, size_t m, size_t n, double *out);

/**
 * Whether `m0` vacuum reports pass the threshold for `m` pulses at `alpha`.
 *
 * # Safety
 * `out` must be writable.
 */
enum VpStatus vp_threshold_check(size_t m0, size_t m, double alpha, bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VERIPHOTON_H */
