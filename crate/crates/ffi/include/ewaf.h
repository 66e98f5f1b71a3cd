/* C interface to the ewaf forecasting library. */

#ifndef EWAF_H
#define EWAF_H

/* Generated by cbindgen from crates/ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Built-in loss functions.
 */
typedef enum EwafLossKind {
  /**
   * |prediction − outcome|
   */
  EwafLossKind_Absolute = 0,
  /**
   * (prediction − outcome)²
   */
  EwafLossKind_Squared = 1,
} EwafLossKind;

/**
 * Status code returned by every fallible operation.
 */
typedef enum EwafStatus {
  EwafStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  EwafStatus_NullPointer = 1,
  /**
   * An argument was out of its domain (expert counts, unit-interval
   * values, ...).
   */
  EwafStatus_InvalidArgument = 2,
  /**
   * The schedule is invalid for the requested round or horizon.
   */
  EwafStatus_ScheduleError = 3,
  /**
   * A loss evaluation left [0, 1].
   */
  EwafStatus_LossOutOfRange = 4,
  /**
   * A buffer length does not match the expert count.
   */
  EwafStatus_LengthMismatch = 5,
} EwafStatus;

/**
 * Opaque forecaster handle.
 */
typedef struct EwafForecaster EwafForecaster;

/**
 * Opaque learning-rate schedule handle.
 */
typedef struct EwafSchedule EwafSchedule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Schedule η_t = √(4 ln N / t). Returns null unless `num_experts` ≥ 2.
 */
struct EwafSchedule *ewaf_schedule_sqrt4(size_t num_experts);

/**
 * Schedule η_t = √(8 ln N / t). Returns null unless `num_experts` ≥ 2.
 */
struct EwafSchedule *ewaf_schedule_sqrt8(size_t num_experts);

/**
 * Constant schedule. Returns null unless `value` is a positive finite real.
 */
struct EwafSchedule *ewaf_schedule_constant(double value);

/**
 * Explicit rate sequence; entry k is the rate for round k+1. The values are
 * copied. Returns null when `values` is null or `len` is 0. Positivity and
 * monotonicity are checked by `ewaf_schedule_validate` and at use.
 *
 * # Safety
 *
 * `values` must point to `len` readable doubles.
 */
struct EwafSchedule *ewaf_schedule_custom(const double *values, size_t len);

/**
 * Writes η_t for 1-based round `t` to `out_eta`.
 *
 * # Safety
 *
 * `schedule` must be a live handle from a schedule constructor; `out_eta`
 * must be writable.
 */
enum EwafStatus ewaf_schedule_eta(const struct EwafSchedule *schedule, size_t t, double *out_eta);

/**
 * Checks positivity and monotonicity of the schedule over `horizon` rounds.
 *
 * # Safety
 *
 * `schedule` must be a live handle from a schedule constructor.
 */
enum EwafStatus ewaf_schedule_validate(const struct EwafSchedule *schedule, size_t horizon);

/**
 * Frees a schedule handle; null is ignored.
 *
 * # Safety
 *
 * `schedule` must be null or a handle not yet freed.
 */
void ewaf_schedule_free(struct EwafSchedule *schedule);

/**
 * Creates a forecaster over `num_experts` experts with a copy of the
 * schedule. Returns null on invalid arguments (no experts, null or invalid
 * schedule).
 *
 * # Safety
 *
 * `schedule` must be a live handle from a schedule constructor.
 */
struct EwafForecaster *ewaf_forecaster_new(size_t num_experts,
                                           const struct EwafSchedule *schedule,
                                           enum EwafLossKind loss);

/**
 * Writes the number of completed rounds to `out_round`.
 *
 * # Safety
 *
 * `forecaster` must be a live handle; `out_round` must be writable.
 */
enum EwafStatus ewaf_forecaster_round(const struct EwafForecaster *forecaster, size_t *out_round);

/**
 * Writes the upcoming round's normalized weights into `out_weights`, which
 * must hold exactly `len == num_experts` doubles.
 *
 * # Safety
 *
 * `forecaster` must be a live handle; `out_weights` must point to `len`
 * writable doubles.
 */
enum EwafStatus ewaf_forecaster_weights(const struct EwafForecaster *forecaster,
                                        double *out_weights,
                                        size_t len);

/**
 * Writes the weighted prediction for `advice` (all values in [0, 1]) to
 * `out_prediction` without advancing the forecaster.
 *
 * # Safety
 *
 * `forecaster` must be a live handle; `advice` must point to `len` readable
 * doubles; `out_prediction` must be writable.
 */
enum EwafStatus ewaf_forecaster_predict(const struct EwafForecaster *forecaster,
                                        const double *advice,
                                        size_t len,
                                        double *out_prediction);

/**
 * Runs one round: predicts on `advice`, observes `outcome`, charges losses,
 * and advances. On success optionally writes the prediction and the
 * forecaster's instantaneous loss (pass null to skip either).
 *
 * # Safety
 *
 * `forecaster` must be a live handle; `advice` must point to `len` readable
 * doubles; `out_prediction` and `out_loss` must each be null or writable.
 */
enum EwafStatus ewaf_forecaster_step(struct EwafForecaster *forecaster,
                                     const double *advice,
                                     size_t len,
                                     double outcome,
                                     double *out_prediction,
                                     double *out_loss);

/**
 * Writes the cumulative expert losses into `out_losses`, which must hold
 * exactly `len == num_experts` doubles.
 *
 * # Safety
 *
 * `forecaster` must be a live handle; `out_losses` must point to `len`
 * writable doubles.
 */
enum EwafStatus ewaf_forecaster_cumulative_losses(const struct EwafForecaster *forecaster,
                                                  double *out_losses,
                                                  size_t len);

/**
 * Writes the regret (cumulative forecaster loss minus the best expert's) to
 * `out_regret`; may be negative.
 *
 * # Safety
 *
 * `forecaster` must be a live handle; `out_regret` must be writable.
 */
enum EwafStatus ewaf_forecaster_regret(const struct EwafForecaster *forecaster, double *out_regret);

/**
 * Writes the index of the expert with minimal cumulative loss (ties go to
 * the lowest index) to `out_index`.
 *
 * # Safety
 *
 * `forecaster` must be a live handle; `out_index` must be writable.
 */
enum EwafStatus ewaf_forecaster_best_expert(const struct EwafForecaster *forecaster,
                                            size_t *out_index);

/**
 * Frees a forecaster handle; null is ignored.
 *
 * # Safety
 *
 * `forecaster` must be null or a handle not yet freed.
 */
void ewaf_forecaster_free(struct EwafForecaster *forecaster);

/**
 * Writes ln(N)/η_n + (1/8)·Σ_{t≤n} η_t to `out_bound`.
 *
 * # Safety
 *
 * `schedule` must be a live handle; `out_bound` must be writable.
 */
enum EwafStatus ewaf_bound_time_varying(const struct EwafSchedule *schedule,
                                        size_t num_experts,
                                        size_t horizon,
                                        double *out_bound);

/**
 * Writes √(n ln N) to `out_bound`; requires `num_experts` ≥ 2.
 *
 * # Safety
 *
 * `out_bound` must be writable.
 */
enum EwafStatus ewaf_bound_corollary(size_t num_experts, size_t horizon, double *out_bound);

/**
 * Writes (2/η_n − 1/η_1)·ln N + (1/8)·Σ_{t≤n} η_t to `out_bound`.
 *
 * # Safety
 *
 * `schedule` must be a live handle; `out_bound` must be writable.
 */
enum EwafStatus ewaf_bound_comparison(const struct EwafSchedule *schedule,
                                      size_t num_experts,
                                      size_t horizon,
                                      double *out_bound);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* EWAF_H */
