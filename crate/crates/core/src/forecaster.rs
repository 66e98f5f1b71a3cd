//! The exponentially weighted average forecaster with a time-varying rate.
//!
//! Each round t the forecaster weighs expert i by exp(−η_t L_{i,t−1}), where
//! L_{i,t−1} is the expert's cumulative loss so far and η_t comes from the
//! schedule, predicts the weight-averaged advice, observes the outcome, and
//! charges every expert (and itself) the instantaneous loss.
//!
//! Two details are load-bearing:
//!
//! - Weights are recomputed from cumulative losses every round. Because η_t
//!   changes between rounds, an incremental multiplicative update would
//!   silently implement a different algorithm.
//! - Exponentiation happens in the log domain with the maximum exponent
//!   subtracted first. Cumulative losses grow linearly with t, and the naive
//!   exp(−ηL) underflows long before runs of interesting length finish.

use std::fmt;

use crate::environment::LossFunction;
use crate::schedule::{LearningRateSchedule, ScheduleError};

/// A point of the decision space [0, 1]. Both expert advice and the
/// aggregated prediction are decisions.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Decision(f64);

impl Decision {
    pub fn new(value: f64) -> Result<Self, RangeError> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(RangeError {
                what: "decision",
                value,
            })
        }
    }

    /// Constructor for values already proven to lie in [0, 1].
    pub(crate) fn new_unchecked(value: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&value));
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// An observed outcome in [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Outcome(f64);

impl Outcome {
    pub fn new(value: f64) -> Result<Self, RangeError> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(RangeError {
                what: "outcome",
                value,
            })
        }
    }

    pub(crate) fn new_unchecked(value: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&value));
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A value that was required to lie in the unit interval but does not.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeError {
    pub what: &'static str,
    pub value: f64,
}

impl fmt::Display for RangeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} is outside [0, 1]", self.what, self.value)
    }
}

impl std::error::Error for RangeError {}

/// Normalized weights over the expert pool: nonnegative, summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Wraps weights assumed to be normalized already; for fabricating
    /// records in tests.
    #[cfg(test)]
    pub(crate) fn from_raw(weights: Vec<f64>) -> Self {
        Self(weights)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Everything observable about one completed round.
#[derive(Clone, Debug)]
pub struct RoundRecord {
    /// 1-based round number t.
    pub round: usize,
    /// The rate η_t in force this round.
    pub eta: f64,
    /// Advice f_{i,t} as offered, one entry per expert.
    pub advice: Vec<Decision>,
    /// The normalized weights used to aggregate the advice.
    pub weights: WeightVector,
    /// The aggregated prediction.
    pub prediction: Decision,
    /// The observed outcome y_t.
    pub outcome: Outcome,
    /// Instantaneous loss of each expert, in [0, 1].
    pub expert_losses: Vec<f64>,
    /// Instantaneous loss of the forecaster, in [0, 1].
    pub forecaster_loss: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ForecasterError {
    /// The expert pool must not be empty.
    NoExperts,
    Schedule(ScheduleError),
    /// Advice length does not match the expert pool.
    AdviceLength {
        expected: usize,
        got: usize,
    },
    /// The loss function returned a value outside [0, 1]; the regret
    /// guarantee requires unit-range losses, so this is a hard error rather
    /// than a clamp. `expert` is None when the forecaster's own loss is at
    /// fault.
    LossOutOfRange {
        round: usize,
        expert: Option<usize>,
        value: f64,
    },
}

impl fmt::Display for ForecasterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoExperts => write!(f, "forecaster needs at least one expert"),
            Self::Schedule(e) => write!(f, "schedule: {e}"),
            Self::AdviceLength { expected, got } => {
                write!(f, "expected advice for {expected} experts, got {got}")
            }
            Self::LossOutOfRange {
                round,
                expert,
                value,
            } => match expert {
                Some(i) => write!(
                    f,
                    "loss {value} for expert {i} at round {round} is outside [0, 1]"
                ),
                None => write!(
                    f,
                    "forecaster loss {value} at round {round} is outside [0, 1]"
                ),
            },
        }
    }
}

impl std::error::Error for ForecasterError {}

impl From<ScheduleError> for ForecasterError {
    fn from(e: ScheduleError) -> Self {
        Self::Schedule(e)
    }
}

/// Forecaster state: cumulative losses plus the schedule and loss in force.
#[derive(Clone, Debug)]
pub struct Forecaster {
    num_experts: usize,
    round: usize,
    cumulative_expert_losses: Vec<f64>,
    cumulative_forecaster_loss: f64,
    schedule: LearningRateSchedule,
    loss: LossFunction,
}

impl Forecaster {
    /// A fresh forecaster at round 0 with all cumulative losses zero.
    ///
    /// Rejects an empty expert pool and any schedule that fails validation
    /// (custom sequences are validated over their whole length).
    pub fn new(
        num_experts: usize,
        schedule: LearningRateSchedule,
        loss: LossFunction,
    ) -> Result<Self, ForecasterError> {
        if num_experts == 0 {
            return Err(ForecasterError::NoExperts);
        }
        let span = match &schedule {
            LearningRateSchedule::Custom { values } => values.len().max(1),
            _ => 1,
        };
        schedule.validate(span)?;
        Ok(Self {
            num_experts,
            round: 0,
            cumulative_expert_losses: vec![0.0; num_experts],
            cumulative_forecaster_loss: 0.0,
            schedule,
            loss,
        })
    }

    pub fn num_experts(&self) -> usize {
        self.num_experts
    }

    /// Rounds completed so far.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn cumulative_expert_losses(&self) -> &[f64] {
        &self.cumulative_expert_losses
    }

    pub fn cumulative_forecaster_loss(&self) -> f64 {
        self.cumulative_forecaster_loss
    }

    pub fn schedule(&self) -> &LearningRateSchedule {
        &self.schedule
    }

    pub fn loss(&self) -> LossFunction {
        self.loss
    }

    /// The rate η_{t+1} that the next call to [`Self::step`] will use.
    pub fn next_eta(&self) -> Result<f64, ScheduleError> {
        self.schedule.eta(self.round + 1)
    }

    /// Normalized weights for the upcoming round: weight_i ∝ exp(−η_t L_{i,t−1})
    /// with η_t the upcoming round's rate applied to past cumulative losses.
    pub fn weights(&self) -> Result<WeightVector, ForecasterError> {
        let eta = self.next_eta()?;
        Ok(self.weights_at(eta))
    }

    fn weights_at(&self, eta: f64) -> WeightVector {
        let max_score = self
            .cumulative_expert_losses
            .iter()
            .map(|l| -eta * l)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = self
            .cumulative_expert_losses
            .iter()
            .map(|l| (-eta * l - max_score).exp())
            .collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        WeightVector(weights)
    }

    /// The weight-weighted average of the advice, guaranteed to lie in the
    /// convex hull [min advice, max advice].
    pub fn predict(&self, advice: &[Decision]) -> Result<Decision, ForecasterError> {
        if advice.len() != self.num_experts {
            return Err(ForecasterError::AdviceLength {
                expected: self.num_experts,
                got: advice.len(),
            });
        }
        let weights = self.weights()?;
        Ok(weighted_prediction(&weights, advice))
    }

    /// Runs one full round: predict on the advice, observe the outcome,
    /// charge losses, and advance the round counter.
    ///
    /// On error the state is left untouched.
    pub fn step(
        &mut self,
        advice: &[Decision],
        outcome: Outcome,
    ) -> Result<RoundRecord, ForecasterError> {
        if advice.len() != self.num_experts {
            return Err(ForecasterError::AdviceLength {
                expected: self.num_experts,
                got: advice.len(),
            });
        }
        let t = self.round + 1;
        let eta = self.schedule.eta(t)?;
        let weights = self.weights_at(eta);
        let prediction = weighted_prediction(&weights, advice);

        let mut expert_losses = Vec::with_capacity(self.num_experts);
        for (i, &a) in advice.iter().enumerate() {
            let l = self.loss.eval(a, outcome);
            if !(0.0..=1.0).contains(&l) {
                return Err(ForecasterError::LossOutOfRange {
                    round: t,
                    expert: Some(i),
                    value: l,
                });
            }
            expert_losses.push(l);
        }
        let forecaster_loss = self.loss.eval(prediction, outcome);
        if !(0.0..=1.0).contains(&forecaster_loss) {
            return Err(ForecasterError::LossOutOfRange {
                round: t,
                expert: None,
                value: forecaster_loss,
            });
        }

        for (cum, l) in self.cumulative_expert_losses.iter_mut().zip(&expert_losses) {
            *cum += l;
        }
        self.cumulative_forecaster_loss += forecaster_loss;
        self.round = t;

        Ok(RoundRecord {
            round: t,
            eta,
            advice: advice.to_vec(),
            weights,
            prediction,
            outcome,
            expert_losses,
            forecaster_loss,
        })
    }

    /// L̂_t − min_i L_{i,t}. May be negative; it is an excess, not a norm.
    pub fn regret(&self) -> f64 {
        self.cumulative_forecaster_loss - min_of(&self.cumulative_expert_losses)
    }

    /// Index of the expert with minimal cumulative loss, ties to the lowest
    /// index.
    pub fn best_expert(&self) -> usize {
        let mut best = 0;
        for (i, &l) in self.cumulative_expert_losses.iter().enumerate().skip(1) {
            if l < self.cumulative_expert_losses[best] {
                best = i;
            }
        }
        best
    }
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

fn weighted_prediction(weights: &WeightVector, advice: &[Decision]) -> Decision {
    let mut dot = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (w, a) in weights.as_slice().iter().zip(advice) {
        dot += w * a.value();
        lo = lo.min(a.value());
        hi = hi.max(a.value());
    }
    // The dot product can drift past the hull by an ulp; pin it back.
    Decision::new_unchecked(dot.clamp(lo, hi))
}
