//! C ABI for the ewaf forecasting library.
//!
//! Handles are opaque pointers created and destroyed here; operations return
//! an [`EwafStatus`] code and write results through out-pointers. Constructor
//! functions return null on invalid input. The generated header lives at
//! `include/ewaf.h`.

use ewaf::bounds::{self, BoundsError};
use ewaf::environment::LossFunction;
use ewaf::forecaster::{Decision, Forecaster, ForecasterError, Outcome};
use ewaf::schedule::LearningRateSchedule;

/// Status code returned by every fallible operation.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EwafStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of its domain (expert counts, unit-interval
    /// values, ...).
    InvalidArgument = 2,
    /// The schedule is invalid for the requested round or horizon.
    ScheduleError = 3,
    /// A loss evaluation left [0, 1].
    LossOutOfRange = 4,
    /// A buffer length does not match the expert count.
    LengthMismatch = 5,
}

/// Built-in loss functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EwafLossKind {
    /// |prediction − outcome|
    Absolute = 0,
    /// (prediction − outcome)²
    Squared = 1,
}

/// Opaque learning-rate schedule handle.
pub struct EwafSchedule {
    inner: LearningRateSchedule,
}

/// Opaque forecaster handle.
pub struct EwafForecaster {
    inner: Forecaster,
}

fn status_of_forecaster_error(e: &ForecasterError) -> EwafStatus {
    match e {
        ForecasterError::NoExperts => EwafStatus::InvalidArgument,
        ForecasterError::Schedule(_) => EwafStatus::ScheduleError,
        ForecasterError::AdviceLength { .. } => EwafStatus::LengthMismatch,
        ForecasterError::LossOutOfRange { .. } => EwafStatus::LossOutOfRange,
    }
}

fn status_of_bounds_error(e: &BoundsError) -> EwafStatus {
    match e {
        BoundsError::NoExperts | BoundsError::TooFewExperts { .. } => EwafStatus::InvalidArgument,
        BoundsError::Schedule(_) => EwafStatus::ScheduleError,
    }
}

unsafe fn decisions_from_raw(advice: *const f64, len: usize) -> Result<Vec<Decision>, EwafStatus> {
    if advice.is_null() {
        return Err(EwafStatus::NullPointer);
    }
    let slice = std::slice::from_raw_parts(advice, len);
    slice
        .iter()
        .map(|&v| Decision::new(v).map_err(|_| EwafStatus::InvalidArgument))
        .collect()
}

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

/// Schedule η_t = √(4 ln N / t). Returns null unless `num_experts` ≥ 2.
#[no_mangle]
pub extern "C" fn ewaf_schedule_sqrt4(num_experts: usize) -> *mut EwafSchedule {
    match LearningRateSchedule::sqrt_decay4(num_experts) {
        Ok(inner) => Box::into_raw(Box::new(EwafSchedule { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Schedule η_t = √(8 ln N / t). Returns null unless `num_experts` ≥ 2.
#[no_mangle]
pub extern "C" fn ewaf_schedule_sqrt8(num_experts: usize) -> *mut EwafSchedule {
    match LearningRateSchedule::sqrt_decay8(num_experts) {
        Ok(inner) => Box::into_raw(Box::new(EwafSchedule { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Constant schedule. Returns null unless `value` is a positive finite real.
#[no_mangle]
pub extern "C" fn ewaf_schedule_constant(value: f64) -> *mut EwafSchedule {
    match LearningRateSchedule::constant(value) {
        Ok(inner) => Box::into_raw(Box::new(EwafSchedule { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Explicit rate sequence; entry k is the rate for round k+1. The values are
/// copied. Returns null when `values` is null or `len` is 0. Positivity and
/// monotonicity are checked by `ewaf_schedule_validate` and at use.
///
/// # Safety
///
/// `values` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn ewaf_schedule_custom(values: *const f64, len: usize) -> *mut EwafSchedule {
    if values.is_null() || len == 0 {
        return std::ptr::null_mut();
    }
    let values = std::slice::from_raw_parts(values, len).to_vec();
    match LearningRateSchedule::custom(values) {
        Ok(inner) => Box::into_raw(Box::new(EwafSchedule { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Writes η_t for 1-based round `t` to `out_eta`.
///
/// # Safety
///
/// `schedule` must be a live handle from a schedule constructor; `out_eta`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn ewaf_schedule_eta(
    schedule: *const EwafSchedule,
    t: usize,
    out_eta: *mut f64,
) -> EwafStatus {
    if schedule.is_null() || out_eta.is_null() {
        return EwafStatus::NullPointer;
    }
    match (*schedule).inner.eta(t) {
        Ok(eta) => {
            *out_eta = eta;
            EwafStatus::Ok
        }
        Err(_) => EwafStatus::ScheduleError,
    }
}

/// Checks positivity and monotonicity of the schedule over `horizon` rounds.
///
/// # Safety
///
/// `schedule` must be a live handle from a schedule constructor.
#[no_mangle]
pub unsafe extern "C" fn ewaf_schedule_validate(
    schedule: *const EwafSchedule,
    horizon: usize,
) -> EwafStatus {
    if schedule.is_null() {
        return EwafStatus::NullPointer;
    }
    match (*schedule).inner.validate(horizon) {
        Ok(_) => EwafStatus::Ok,
        Err(_) => EwafStatus::ScheduleError,
    }
}

/// Frees a schedule handle; null is ignored.
///
/// # Safety
///
/// `schedule` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ewaf_schedule_free(schedule: *mut EwafSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

// ---------------------------------------------------------------------------
// Forecaster
// ---------------------------------------------------------------------------

/// Creates a forecaster over `num_experts` experts with a copy of the
/// schedule. Returns null on invalid arguments (no experts, null or invalid
/// schedule).
///
/// # Safety
///
/// `schedule` must be a live handle from a schedule constructor.
#[no_mangle]
pub unsafe extern "C" fn ewaf_forecaster_new(
    num_experts: usize,
    schedule: *const EwafSchedule,
    loss: EwafLossKind,
) -> *mut EwafForecaster {
    if schedule.is_null() {
        return std::ptr::null_mut();
    }
    let loss = match loss {
        EwafLossKind::Absolute => LossFunction::Absolute,
        EwafLossKind::Squared => LossFunction::Squared,
    };
    match Forecaster::new(num_experts, (*schedule).inner.clone(), loss) {
        Ok(inner) => Box::into_raw(Box::new(EwafForecaster { inner })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Writes the number of completed rounds to `out_round`.
///
/// # Safety
///
/// `forecaster` must be a live handle; `out_round` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ewaf_forecaster_round(
    forecaster: *const EwafForecaster,
    out_round: *mut usize,
) -> EwafStatus {
    if forecaster.is_null() || out_round.is_null() {
        return EwafStatus::NullPointer;
    }
    *out_round = (*forecaster).inner.round();
    EwafStatus::Ok
}

/// Writes the upcoming round's normalized weights into `out_weights`, which
/// must hold exactly `len == num_experts` doubles.
///
/// # Safety
///
/// `forecaster` must be a live handle; `out_weights` must point to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ewaf_forecaster_weights(
    forecaster: *const EwafForecaster,
    out_weights: *mut f64,
    len: usize,
) -> EwafStatus {
    if forecaster.is_null() || out_weights.is_null() {
        return EwafStatus::NullPointer;
    }
    let inner = &(*forecaster).inner;
    if len != inner.num_experts() {
        return EwafStatus::LengthMismatch;
    }
    match inner.weights() {
        Ok(weights) => {
            std::ptr::copy_nonoverlapping(weights.as_slice().as_ptr(), out_weights, len);
            EwafStatus::Ok
        }
        Err(e) => status_of_forecaster_error(&e),
    }
}

/// Writes the weighted prediction for `advice` (all values in [0, 1]) to
/// `out_prediction` without advancing the forecaster.
///
/// # Safety
///
/// `forecaster` must be a live handle; `advice` must point to `len` readable
/// doubles; `out_prediction` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ewaf_forecaster_predict(
    forecaster: *const EwafForecaster,
    advice: *const f64,
    len: usize,
    out_prediction: *mut f64,
) -> EwafStatus {
    if forecaster.is_null() || out_prediction.is_null() {
        return EwafStatus::NullPointer;
    }
    let advice = match decisions_from_raw(advice, len) {
        Ok(advice) => advice,
        Err(status) => return status,
    };
    match (*forecaster).inner.predict(&advice) {
        Ok(prediction) => {
            *out_prediction = prediction.value();
            EwafStatus::Ok
        }
        Err(e) => status_of_forecaster_error(&e),
    }
}

/// Runs one round: predicts on `advice`, observes `outcome`, charges losses,
/// and advances. On success optionally writes the prediction and the
/// forecaster's instantaneous loss (pass null to skip either).
///
/// # Safety
///
/// `forecaster` must be a live handle; `advice` must point to `len` readable
/// doubles; `out_prediction` and `out_loss` must each be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ewaf_forecaster_step(
    forecaster: *mut EwafForecaster,
    advice: *const f64,
    len: usize,
    outcome: f64,
    out_prediction: *mut f64,
    out_loss: *mut f64,
) -> EwafStatus {
    if forecaster.is_null() {
        return EwafStatus::NullPointer;
    }
    let advice = match decisions_from_raw(advice, len) {
        Ok(advice) => advice,
        Err(status) => return status,
    };
    let outcome = match Outcome::new(outcome) {
        Ok(outcome) => outcome,
        Err(_) => return EwafStatus::InvalidArgument,
    };
    match (*forecaster).inner.step(&advice, outcome) {
        Ok(record) => {
            if !out_prediction.is_null() {
                *out_prediction = record.prediction.value();
            }
            if !out_loss.is_null() {
                *out_loss = record.forecaster_loss;
            }
            EwafStatus::Ok
        }
        Err(e) => status_of_forecaster_error(&e),
    }
}

/// Writes the cumulative expert losses into `out_losses`, which must hold
/// exactly `len == num_experts` doubles.
///
/// # Safety
///
/// `forecaster` must be a live handle; `out_losses` must point to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ewaf_forecaster_cumulative_losses(
    forecaster: *const EwafForecaster,
    out_losses: *mut f64,
    len: usize,
) -> EwafStatus {
    if forecaster.is_null() || out_losses.is_null() {
        return EwafStatus::NullPointer;
    }
    let inner = &(*forecaster).inner;
    if len != inner.num_experts() {
        return EwafStatus::LengthMismatch;
    }
    std::ptr::copy_nonoverlapping(inner.cumulative_expert_losses().as_ptr(), out_losses, len);
    EwafStatus::Ok
}

/// Writes the regret (cumulative forecaster loss minus the best expert's) to
/// `out_regret`; may be negative.
///
/// # Safety
///
/// `forecaster` must be a live handle; `out_regret` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ewaf_forecaster_regret(
    forecaster: *const EwafForecaster,
    out_regret: *mut f64,
) -> EwafStatus {
    if forecaster.is_null() || out_regret.is_null() {
        return EwafStatus::NullPointer;
    }
    *out_regret = (*forecaster).inner.regret();
    EwafStatus::Ok
}

/// Writes the index of the expert with minimal cumulative loss (ties go to
/// the lowest index) to `out_index`.
///
/// # Safety
///
/// `forecaster` must be a live handle; `out_index` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ewaf_forecaster_best_expert(
    forecaster: *const EwafForecaster,
    out_index: *mut usize,
) -> EwafStatus {
    if forecaster.is_null() || out_index.is_null() {
        return EwafStatus::NullPointer;
    }
    *out_index = (*forecaster).inner.best_expert();
    EwafStatus::Ok
}

/// Frees a forecaster handle; null is ignored.
///
/// # Safety
///
/// `forecaster` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ewaf_forecaster_free(forecaster: *mut EwafForecaster) {
    if !forecaster.is_null() {
        drop(Box::from_raw(forecaster));
    }
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

/// Writes ln(N)/η_n + (1/8)·Σ_{t≤n} η_t to `out_bound`.
///
/// # Safety
///
/// `schedule` must be a live handle; `out_bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ewaf_bound_time_varying(
    schedule: *const EwafSchedule,
    num_experts: usize,
    horizon: usize,
    out_bound: *mut f64,
) -> EwafStatus {
    if schedule.is_null() || out_bound.is_null() {
        return EwafStatus::NullPointer;
    }
    match bounds::bound_time_varying(&(*schedule).inner, num_experts, horizon) {
        Ok(bound) => {
            *out_bound = bound;
            EwafStatus::Ok
        }
        Err(e) => status_of_bounds_error(&e),
    }
}

/// Writes √(n ln N) to `out_bound`; requires `num_experts` ≥ 2.
///
/// # Safety
///
/// `out_bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ewaf_bound_corollary(
    num_experts: usize,
    horizon: usize,
    out_bound: *mut f64,
) -> EwafStatus {
    if out_bound.is_null() {
        return EwafStatus::NullPointer;
    }
    match bounds::bound_corollary(num_experts, horizon) {
        Ok(bound) => {
            *out_bound = bound;
            EwafStatus::Ok
        }
        Err(e) => status_of_bounds_error(&e),
    }
}

/// Writes (2/η_n − 1/η_1)·ln N + (1/8)·Σ_{t≤n} η_t to `out_bound`.
///
/// # Safety
///
/// `schedule` must be a live handle; `out_bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ewaf_bound_comparison(
    schedule: *const EwafSchedule,
    num_experts: usize,
    horizon: usize,
    out_bound: *mut f64,
) -> EwafStatus {
    if schedule.is_null() || out_bound.is_null() {
        return EwafStatus::NullPointer;
    }
    match bounds::bound_comparison(&(*schedule).inner, num_experts, horizon) {
        Ok(bound) => {
            *out_bound = bound;
            EwafStatus::Ok
        }
        Err(e) => status_of_bounds_error(&e),
    }
}
