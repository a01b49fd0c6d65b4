#ifndef FEMTONET_H
#define FEMTONET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum FemtonetStatus {
  FEMTONET_STATUS_OK = 0,
  FEMTONET_STATUS_NULL_POINTER = 1,
  FEMTONET_STATUS_DOMAIN = 2,
  FEMTONET_STATUS_NUMERIC = 3,
  FEMTONET_STATUS_INFEASIBLE = 4,
  FEMTONET_STATUS_PANIC = 5,
} FemtonetStatus;

/**
 * Rate selection for the average goodput.
 */
typedef enum FemtonetBackoff {
  FEMTONET_BACKOFF_NONE = 0,
  FEMTONET_BACKOFF_OPTIMAL = 1,
} FemtonetBackoff;

/**
 * Opaque system parameter set.
 */
typedef struct FemtonetParams FemtonetParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty after success-only use.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *femtonet_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *femtonet_version(void);

/**
 * New handle holding the default deployment. Free with [`femtonet_params_free`].
 */
struct FemtonetParams *femtonet_params_new(void);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `handle` must come from [`femtonet_params_new`] and not be used afterwards.
 */
void femtonet_params_free(struct FemtonetParams *handle);

/**
 * Base-station and femtocell antenna counts.
 */
enum FemtonetStatus femtonet_params_set_antennas(struct FemtonetParams *handle,
                                                 size_t n_b,
                                                 size_t n_f);

enum FemtonetStatus femtonet_params_set_bits(struct FemtonetParams *handle, uint32_t bits);

enum FemtonetStatus femtonet_params_set_velocity_kmh(struct FemtonetParams *handle, double kmh);

enum FemtonetStatus femtonet_params_set_delay_frames(struct FemtonetParams *handle,
                                                     uint32_t frames);

/**
 * Femtocell density given as an average count per macrocell.
 */
enum FemtonetStatus femtonet_params_set_femtocells_per_cell(struct FemtonetParams *handle,
                                                            double count);

/**
 * Distance from the macro base station to the user, m.
 */
enum FemtonetStatus femtonet_params_set_user_distance(struct FemtonetParams *handle, double meters);

/**
 * Places the user where the receive SNR equals `snr_db`.
 */
enum FemtonetStatus femtonet_params_set_snr_db(struct FemtonetParams *handle, double snr_db);

/**
 * Temporal correlation of the channel over the feedback delay.
 */
enum FemtonetStatus femtonet_correlation(const struct FemtonetParams *handle, double *out);

/**
 * P[SIR >= threshold] for a linear threshold.
 */
enum FemtonetStatus femtonet_success_probability(const struct FemtonetParams *handle,
                                                 double threshold,
                                                 double *out);

/**
 * Largest femtocell density (per m^2) keeping outage at or below `epsilon`
 * for an SIR threshold in dB.
 */
enum FemtonetStatus femtonet_max_density(const struct FemtonetParams *handle,
                                         double epsilon,
                                         double threshold_db,
                                         double *out);

/**
 * Optimal backoff factor for a transmitter SIR estimate (linear). A zero
 * `interference` selects the delay-only link.
 */
enum FemtonetStatus femtonet_beta_star(const struct FemtonetParams *handle,
                                       double sir_estimate,
                                       int32_t interference,
                                       double *out);

/**
 * Average goodput in bit/s/Hz.
 */
enum FemtonetStatus femtonet_average_goodput(const struct FemtonetParams *handle,
                                             enum FemtonetBackoff backoff,
                                             double *out);

enum FemtonetStatus femtonet_bessel_j0(double x, double *out);

/**
 * Lambert W; a nonzero `lower` selects the branch W_-1.
 */
enum FemtonetStatus femtonet_lambert_w(double x, int32_t lower, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FEMTONET_H */
