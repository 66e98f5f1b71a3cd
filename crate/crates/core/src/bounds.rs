//! Closed-form regret bounds for the forecaster and their comparison.
//!
//! Three quantities are computed for a schedule η over horizon n with N
//! experts:
//!
//! - [`bound_time_varying`]: ln(N)/η_n + (1/8)·Σ_{t≤n} η_t, the guarantee the
//!   forecaster actually satisfies;
//! - [`bound_corollary`]: √(n ln N), what the time-varying bound collapses to
//!   under the tuned schedule η_t = √(4 ln N / t);
//! - [`bound_comparison`]: (2/η_n − 1/η_1)·ln N + (1/8)·Σ_{t≤n} η_t, the
//!   older guarantee. It exceeds the time-varying bound whenever η_n ≠ η_1
//!   and coincides with it for constant rates.
//!
//! The rate sum is always formed by direct (compensated) summation rather
//! than a closed form, so the bounds stay exact for arbitrary custom
//! schedules.

use std::fmt;

use serde::Serialize;

use crate::numeric::KahanSum;
use crate::schedule::{LearningRateSchedule, ScheduleError};

/// Absolute tolerance for algebraic identities between bound formulas.
pub const ALGEBRAIC_TOLERANCE: f64 = 1e-12;

/// Slack allowed when comparing a realized run against its bound; run losses
/// accumulate rounding over up to 10^6 additions.
pub const RUN_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum BoundsError {
    /// Bounds need at least one expert.
    NoExperts,
    /// The √(n ln N) form is only meaningful for N ≥ 2.
    TooFewExperts {
        num_experts: usize,
    },
    Schedule(ScheduleError),
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoExperts => write!(f, "bounds need at least one expert"),
            Self::TooFewExperts { num_experts } => {
                write!(
                    f,
                    "corollary bound needs at least 2 experts, got {num_experts}"
                )
            }
            Self::Schedule(e) => write!(f, "schedule: {e}"),
        }
    }
}

impl std::error::Error for BoundsError {}

impl From<ScheduleError> for BoundsError {
    fn from(e: ScheduleError) -> Self {
        Self::Schedule(e)
    }
}

/// Σ_{t=1}^{horizon} η_t by compensated summation.
fn eta_sum(schedule: &LearningRateSchedule, horizon: usize) -> Result<f64, ScheduleError> {
    let mut sum = KahanSum::new();
    for t in 1..=horizon {
        sum.add(schedule.eta(t)?);
    }
    Ok(sum.value())
}

/// ln(N)/η_n + (1/8)·Σ_{t≤n} η_t.
pub fn bound_time_varying(
    schedule: &LearningRateSchedule,
    num_experts: usize,
    horizon: usize,
) -> Result<f64, BoundsError> {
    if num_experts == 0 {
        return Err(BoundsError::NoExperts);
    }
    schedule.validate(horizon)?;
    let ln_n = (num_experts as f64).ln();
    let eta_final = schedule.eta(horizon)?;
    Ok(ln_n / eta_final + eta_sum(schedule, horizon)? / 8.0)
}

/// √(n ln N); requires N ≥ 2.
pub fn bound_corollary(num_experts: usize, horizon: usize) -> Result<f64, BoundsError> {
    if num_experts < 2 {
        return Err(BoundsError::TooFewExperts { num_experts });
    }
    if horizon == 0 {
        return Err(BoundsError::Schedule(ScheduleError::RoundZero));
    }
    Ok((horizon as f64 * (num_experts as f64).ln()).sqrt())
}

/// (2/η_n − 1/η_1)·ln N + (1/8)·Σ_{t≤n} η_t.
pub fn bound_comparison(
    schedule: &LearningRateSchedule,
    num_experts: usize,
    horizon: usize,
) -> Result<f64, BoundsError> {
    if num_experts == 0 {
        return Err(BoundsError::NoExperts);
    }
    schedule.validate(horizon)?;
    let ln_n = (num_experts as f64).ln();
    let eta_first = schedule.eta(1)?;
    let eta_final = schedule.eta(horizon)?;
    Ok((2.0 / eta_final - 1.0 / eta_first) * ln_n + eta_sum(schedule, horizon)? / 8.0)
}

/// All applicable bounds for one configuration, plus the realized regret when
/// a run supplied one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub horizon: usize,
    pub num_experts: usize,
    pub bound_time_varying: f64,
    /// √(n ln N); present only under the tuned √-decay schedule.
    pub bound_corollary: Option<f64>,
    pub bound_comparison: f64,
    pub realized_regret: Option<f64>,
    /// True when the realized regret exceeds the time-varying bound beyond
    /// [`RUN_TOLERANCE`].
    pub violation: bool,
}

/// Evaluates every applicable bound and flags a violation if the realized
/// regret exceeds the time-varying bound.
pub fn compare_bounds(
    schedule: &LearningRateSchedule,
    num_experts: usize,
    horizon: usize,
    realized_regret: Option<f64>,
) -> Result<BoundReport, BoundsError> {
    let bound_tv = bound_time_varying(schedule, num_experts, horizon)?;
    let bound_cmp = bound_comparison(schedule, num_experts, horizon)?;
    let corollary = match schedule {
        LearningRateSchedule::SqrtDecay4 { .. } => Some(bound_corollary(num_experts, horizon)?),
        _ => None,
    };
    let violation = realized_regret.is_some_and(|r| r > bound_tv + RUN_TOLERANCE);
    Ok(BoundReport {
        horizon,
        num_experts,
        bound_time_varying: bound_tv,
        bound_corollary: corollary,
        bound_comparison: bound_cmp,
        realized_regret,
        violation,
    })
}
