//! Learning-rate schedules: positive nonincreasing sequences η_1 ≥ η_2 ≥ … > 0.
//!
//! The regret guarantee in [`crate::bounds`] holds for any schedule that
//! passes [`LearningRateSchedule::validate`]. Two square-root decay variants
//! are built in: the tuned rate √(4 ln N / t), whose bound collapses to
//! √(n ln N), and the classical rate √(8 ln N / t) kept for comparison runs.

use std::fmt;

/// Rates above this are valid but numerically extreme; the validator emits a
/// warning instead of an error.
pub const LARGE_RATE_WARNING_THRESHOLD: f64 = 50.0;

/// A learning-rate sequence, queried by 1-based round number.
#[derive(Clone, Debug, PartialEq)]
pub enum LearningRateSchedule {
    /// η_t = √(4 ln N / t). Requires N ≥ 2; with a single expert the rate
    /// degenerates to zero.
    SqrtDecay4 { num_experts: usize },
    /// η_t = √(8 ln N / t). Requires N ≥ 2. Exactly √2 times [`Self::SqrtDecay4`].
    SqrtDecay8 { num_experts: usize },
    /// η_t = value for every round.
    Constant { value: f64 },
    /// Explicit finite sequence; round t reads entry t−1. Queries past the
    /// end are errors, never extrapolated.
    Custom { values: Vec<f64> },
}

impl LearningRateSchedule {
    pub fn sqrt_decay4(num_experts: usize) -> Result<Self, ScheduleError> {
        if num_experts < 2 {
            return Err(ScheduleError::DegenerateSqrtRate { num_experts });
        }
        Ok(Self::SqrtDecay4 { num_experts })
    }

    pub fn sqrt_decay8(num_experts: usize) -> Result<Self, ScheduleError> {
        if num_experts < 2 {
            return Err(ScheduleError::DegenerateSqrtRate { num_experts });
        }
        Ok(Self::SqrtDecay8 { num_experts })
    }

    pub fn constant(value: f64) -> Result<Self, ScheduleError> {
        if !value.is_finite() || value <= 0.0 {
            return Err(ScheduleError::NonPositiveRate { t: 1, value });
        }
        Ok(Self::Constant { value })
    }

    pub fn custom(values: Vec<f64>) -> Result<Self, ScheduleError> {
        if values.is_empty() {
            return Err(ScheduleError::EmptyCustom);
        }
        Ok(Self::Custom { values })
    }

    /// The rate η_t for 1-based round t.
    pub fn eta(&self, t: usize) -> Result<f64, ScheduleError> {
        if t == 0 {
            return Err(ScheduleError::RoundZero);
        }
        match self {
            Self::SqrtDecay4 { num_experts } => sqrt_rate(4.0, *num_experts, t),
            Self::SqrtDecay8 { num_experts } => sqrt_rate(8.0, *num_experts, t),
            Self::Constant { value } => Ok(*value),
            Self::Custom { values } => values.get(t - 1).copied().ok_or(ScheduleError::PastEnd {
                t,
                len: values.len(),
            }),
        }
    }

    /// Checks that η_t > 0 for all t ≤ horizon and η_t ≤ η_{t−1} for
    /// 2 ≤ t ≤ horizon, reporting the first offending index otherwise.
    ///
    /// Custom sequences must cover the whole horizon. On success, returns
    /// warnings for conditions that are legal but worth surfacing.
    pub fn validate(&self, horizon: usize) -> Result<Vec<ScheduleWarning>, ScheduleError> {
        if horizon == 0 {
            return Err(ScheduleError::RoundZero);
        }
        match self {
            // Both closed forms are strictly decreasing in t and positive for
            // N ≥ 2; only the degenerate expert count needs checking.
            Self::SqrtDecay4 { num_experts } | Self::SqrtDecay8 { num_experts } => {
                if *num_experts < 2 {
                    return Err(ScheduleError::DegenerateSqrtRate {
                        num_experts: *num_experts,
                    });
                }
            }
            Self::Constant { value } => {
                if !value.is_finite() || *value <= 0.0 {
                    return Err(ScheduleError::NonPositiveRate {
                        t: 1,
                        value: *value,
                    });
                }
            }
            Self::Custom { values } => {
                if values.is_empty() {
                    return Err(ScheduleError::EmptyCustom);
                }
                if values.len() < horizon {
                    return Err(ScheduleError::PastEnd {
                        t: values.len() + 1,
                        len: values.len(),
                    });
                }
                let mut previous = f64::INFINITY;
                for (i, &value) in values[..horizon].iter().enumerate() {
                    let t = i + 1;
                    if !value.is_finite() || value <= 0.0 {
                        return Err(ScheduleError::NonPositiveRate { t, value });
                    }
                    if value > previous {
                        return Err(ScheduleError::IncreasingRate { t, previous, value });
                    }
                    previous = value;
                }
            }
        }
        let mut warnings = Vec::new();
        let eta_1 = self.eta(1)?;
        if eta_1 > LARGE_RATE_WARNING_THRESHOLD {
            warnings.push(ScheduleWarning::LargeInitialRate { eta_1 });
        }
        Ok(warnings)
    }
}

fn sqrt_rate(coefficient: f64, num_experts: usize, t: usize) -> Result<f64, ScheduleError> {
    if num_experts < 2 {
        return Err(ScheduleError::DegenerateSqrtRate { num_experts });
    }
    Ok((coefficient * (num_experts as f64).ln() / t as f64).sqrt())
}

/// Validation failures; `t` is always the first offending round.
#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleError {
    /// √-decay rates are zero (or undefined) without at least two experts.
    DegenerateSqrtRate { num_experts: usize },
    /// Rates must be positive finite reals.
    NonPositiveRate { t: usize, value: f64 },
    /// The sequence increases between consecutive rounds.
    IncreasingRate { t: usize, previous: f64, value: f64 },
    /// Round t lies past the end of an explicit sequence.
    PastEnd { t: usize, len: usize },
    /// An explicit sequence must contain at least one entry.
    EmptyCustom,
    /// Rounds are numbered from 1.
    RoundZero,
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DegenerateSqrtRate { num_experts } => write!(
                f,
                "sqrt-decay schedule needs at least 2 experts, got {num_experts}"
            ),
            Self::NonPositiveRate { t, value } => {
                write!(
                    f,
                    "rate at round {t} is {value}, must be a positive finite real"
                )
            }
            Self::IncreasingRate { t, previous, value } => {
                write!(f, "rate increases at round {t}: {previous} -> {value}")
            }
            Self::PastEnd { t, len } => {
                write!(
                    f,
                    "round {t} is past the end of a {len}-entry rate sequence"
                )
            }
            Self::EmptyCustom => write!(f, "custom rate sequence is empty"),
            Self::RoundZero => write!(f, "rounds are numbered from 1"),
        }
    }
}

impl std::error::Error for ScheduleError {}

/// Conditions that do not invalidate a schedule but deserve attention.
#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleWarning {
    /// η_1 exceeds [`LARGE_RATE_WARNING_THRESHOLD`].
    LargeInitialRate { eta_1: f64 },
}

impl fmt::Display for ScheduleWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LargeInitialRate { eta_1 } => write!(
                f,
                "initial rate {eta_1} exceeds {LARGE_RATE_WARNING_THRESHOLD}; \
                 valid but numerically extreme"
            ),
        }
    }
}
