//! Loss functions plus the outcome and advice generators that drive runs.
//!
//! The regret guarantee needs a loss that is convex in the prediction and
//! maps into [0, 1]; [`convexity_probe`] spot-checks both hypotheses for
//! caller-supplied losses. Outcome generation includes a greedy adaptive
//! adversary that watches the prediction before committing the outcome.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::forecaster::{Decision, Outcome};

/// Loss ℓ(prediction, outcome), expected to be convex in the prediction and
/// to map [0,1]×[0,1] into [0, 1].
#[derive(Clone, Copy, Debug)]
pub enum LossFunction {
    /// ℓ(p, y) = |p − y|
    Absolute,
    /// ℓ(p, y) = (p − y)²
    Squared,
    /// Caller-supplied loss. The forecaster hard-errors on any evaluation
    /// outside [0, 1] instead of clamping: a clamp would silently void the
    /// regret guarantee.
    Custom(fn(f64, f64) -> f64),
}

impl LossFunction {
    pub fn eval(&self, prediction: Decision, outcome: Outcome) -> f64 {
        let (p, y) = (prediction.value(), outcome.value());
        match self {
            Self::Absolute => (p - y).abs(),
            Self::Squared => (p - y) * (p - y),
            Self::Custom(f) => f(p, y),
        }
    }
}

/// Tolerance for the sampled convexity inequality.
pub const CONVEXITY_TOLERANCE: f64 = 1e-12;

/// Why a probed loss function was rejected.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProbeFailure {
    /// ℓ(λp + (1−λ)p′, y) > λℓ(p, y) + (1−λ)ℓ(p′, y) beyond tolerance.
    NotConvex {
        p: f64,
        p_prime: f64,
        y: f64,
        lambda: f64,
        lhs: f64,
        rhs: f64,
    },
    /// An evaluation left [0, 1].
    OutOfRange { p: f64, y: f64, value: f64 },
}

impl fmt::Display for ProbeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotConvex {
                p,
                p_prime,
                y,
                lambda,
                lhs,
                rhs,
            } => write!(
                f,
                "convexity violated at p={p}, p'={p_prime}, y={y}, lambda={lambda}: \
                 {lhs} > {rhs}"
            ),
            Self::OutOfRange { p, y, value } => {
                write!(f, "loss({p}, {y}) = {value} is outside [0, 1]")
            }
        }
    }
}

impl std::error::Error for ProbeFailure {}

/// Samples (p, p′, y, λ) uniformly and checks the convexity inequality and
/// the unit range of the loss. Returns the first counterexample found.
pub fn convexity_probe(
    loss: &LossFunction,
    num_samples: usize,
    seed: u64,
) -> Result<(), ProbeFailure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..num_samples {
        let p = rng.gen_range(0.0..=1.0);
        let p_prime = rng.gen_range(0.0..=1.0);
        let y = rng.gen_range(0.0..=1.0);
        let lambda: f64 = rng.gen_range(0.0..=1.0);
        let outcome = Outcome::new_unchecked(y);

        let lp = loss.eval(Decision::new_unchecked(p), outcome);
        let lq = loss.eval(Decision::new_unchecked(p_prime), outcome);
        for (x, value) in [(p, lp), (p_prime, lq)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ProbeFailure::OutOfRange { p: x, y, value });
            }
        }

        let mix = (lambda * p + (1.0 - lambda) * p_prime).clamp(0.0, 1.0);
        let lhs = loss.eval(Decision::new_unchecked(mix), outcome);
        if !(0.0..=1.0).contains(&lhs) {
            return Err(ProbeFailure::OutOfRange {
                p: mix,
                y,
                value: lhs,
            });
        }
        let rhs = lambda * lp + (1.0 - lambda) * lq;
        if lhs > rhs + CONVEXITY_TOLERANCE {
            return Err(ProbeFailure::NotConvex {
                p,
                p_prime,
                y,
                lambda,
                lhs,
                rhs,
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub enum EnvError {
    /// A probability, outcome, or advice value left [0, 1].
    ValueOutOfRange { what: &'static str, value: f64 },
    /// A scripted outcome list ran out.
    OutcomesExhausted { len: usize },
    /// A scripted advice matrix has no row for round t.
    AdviceExhausted { t: usize, rounds: usize },
    /// Advice must cover at least one expert.
    NoExperts,
    /// A scripted advice matrix must be rectangular.
    RaggedAdvice {
        row: usize,
        expected: usize,
        got: usize,
    },
    /// Random-walk step size must be a positive finite real.
    InvalidStep { step: f64 },
    /// Stateful generators hand out rounds in order.
    NonSequentialRound { expected: usize, got: usize },
}

impl fmt::Display for EnvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ValueOutOfRange { what, value } => {
                write!(f, "{what} {value} is outside [0, 1]")
            }
            Self::OutcomesExhausted { len } => {
                write!(f, "scripted outcome list of length {len} is exhausted")
            }
            Self::AdviceExhausted { t, rounds } => {
                write!(f, "no advice for round {t}: script covers {rounds} rounds")
            }
            Self::NoExperts => write!(f, "advice must cover at least one expert"),
            Self::RaggedAdvice { row, expected, got } => {
                write!(f, "advice row {row} has {got} entries, expected {expected}")
            }
            Self::InvalidStep { step } => {
                write!(f, "random-walk step {step} must be a positive finite real")
            }
            Self::NonSequentialRound { expected, got } => {
                write!(f, "expected round {expected}, got {got}")
            }
        }
    }
}

impl std::error::Error for EnvError {}

// ---------------------------------------------------------------------------
// Outcome generation
// ---------------------------------------------------------------------------

/// Produces the outcome for each round, possibly after seeing the prediction.
#[derive(Clone, Debug)]
pub struct Adversary {
    kind: AdversaryKind,
}

#[derive(Clone, Debug)]
enum AdversaryKind {
    Stochastic { p: f64, rng: Box<ChaCha8Rng> },
    Fixed { outcomes: Vec<f64>, next: usize },
    AdaptiveWorstCase,
}

impl Adversary {
    /// Bernoulli(p) outcomes in {0, 1} from a seeded stream.
    pub fn stochastic(p: f64, seed: u64) -> Result<Self, EnvError> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(EnvError::ValueOutOfRange {
                what: "bernoulli probability",
                value: p,
            });
        }
        Ok(Self {
            kind: AdversaryKind::Stochastic {
                p,
                rng: Box::new(ChaCha8Rng::seed_from_u64(seed)),
            },
        })
    }

    /// Plays back a fixed outcome list; popping past the end is an error.
    pub fn fixed(outcomes: Vec<f64>) -> Result<Self, EnvError> {
        for &y in &outcomes {
            if !y.is_finite() || !(0.0..=1.0).contains(&y) {
                return Err(EnvError::ValueOutOfRange {
                    what: "outcome",
                    value: y,
                });
            }
        }
        Ok(Self {
            kind: AdversaryKind::Fixed { outcomes, next: 0 },
        })
    }

    /// Picks the outcome in {0, 1} farthest from the prediction, maximizing
    /// the instantaneous absolute loss. Ties at prediction 1/2 resolve to 0.
    pub fn adaptive_worst_case() -> Self {
        Self {
            kind: AdversaryKind::AdaptiveWorstCase,
        }
    }

    /// Rounds a scripted adversary can still serve, None when unbounded.
    pub fn rounds_available(&self) -> Option<usize> {
        match &self.kind {
            AdversaryKind::Fixed { outcomes, next } => Some(outcomes.len() - next),
            _ => None,
        }
    }

    pub fn next_outcome(&mut self, prediction: Decision) -> Result<Outcome, EnvError> {
        match &mut self.kind {
            AdversaryKind::Stochastic { p, rng } => {
                let y = if rng.gen::<f64>() < *p { 1.0 } else { 0.0 };
                Ok(Outcome::new_unchecked(y))
            }
            AdversaryKind::Fixed { outcomes, next } => {
                let y = *outcomes.get(*next).ok_or(EnvError::OutcomesExhausted {
                    len: outcomes.len(),
                })?;
                *next += 1;
                Ok(Outcome::new_unchecked(y))
            }
            AdversaryKind::AdaptiveWorstCase => {
                let y = if prediction.value() < 0.5 { 1.0 } else { 0.0 };
                Ok(Outcome::new_unchecked(y))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Advice generation
// ---------------------------------------------------------------------------

/// Produces the expert advice vector for each round.
#[derive(Clone, Debug)]
pub struct AdviceGenerator {
    kind: AdviceKind,
    round: usize,
}

#[derive(Clone, Debug)]
enum AdviceKind {
    Constant {
        values: Vec<f64>,
    },
    RandomWalk {
        step: f64,
        positions: Vec<f64>,
        rng: Box<ChaCha8Rng>,
    },
    Fixed {
        rows: Vec<Vec<f64>>,
    },
}

impl AdviceGenerator {
    /// Every expert repeats the same value each round.
    pub fn constant(values: Vec<f64>) -> Result<Self, EnvError> {
        if values.is_empty() {
            return Err(EnvError::NoExperts);
        }
        for &v in &values {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(EnvError::ValueOutOfRange {
                    what: "advice",
                    value: v,
                });
            }
        }
        Ok(Self {
            kind: AdviceKind::Constant { values },
            round: 0,
        })
    }

    /// Experts wander from seeded uniform starting points by uniform steps in
    /// [−step, step], reflected back into [0, 1] at the boundaries so they
    /// stay distinguishable instead of saturating.
    pub fn random_walk(num_experts: usize, step: f64, seed: u64) -> Result<Self, EnvError> {
        if num_experts == 0 {
            return Err(EnvError::NoExperts);
        }
        if !step.is_finite() || step <= 0.0 {
            return Err(EnvError::InvalidStep { step });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions = (0..num_experts).map(|_| rng.gen_range(0.0..=1.0)).collect();
        Ok(Self {
            kind: AdviceKind::RandomWalk {
                step,
                positions,
                rng: Box::new(rng),
            },
            round: 0,
        })
    }

    /// Plays back a rectangular script, one row of advice per round.
    pub fn fixed(rows: Vec<Vec<f64>>) -> Result<Self, EnvError> {
        let width = rows
            .first()
            .map(Vec::len)
            .ok_or(EnvError::AdviceExhausted { t: 1, rounds: 0 })?;
        if width == 0 {
            return Err(EnvError::NoExperts);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(EnvError::RaggedAdvice {
                    row: i + 1,
                    expected: width,
                    got: row.len(),
                });
            }
            for &v in row {
                if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                    return Err(EnvError::ValueOutOfRange {
                        what: "advice",
                        value: v,
                    });
                }
            }
        }
        Ok(Self {
            kind: AdviceKind::Fixed { rows },
            round: 0,
        })
    }

    pub fn num_experts(&self) -> usize {
        match &self.kind {
            AdviceKind::Constant { values } => values.len(),
            AdviceKind::RandomWalk { positions, .. } => positions.len(),
            AdviceKind::Fixed { rows } => rows[0].len(),
        }
    }

    /// Rounds a scripted generator can still serve, None when unbounded.
    pub fn rounds_available(&self) -> Option<usize> {
        match &self.kind {
            AdviceKind::Fixed { rows } => Some(rows.len().saturating_sub(self.round)),
            _ => None,
        }
    }

    /// Advice for 1-based round t. Calls must be sequential: the walk (and
    /// the scripted cursor) advance exactly one round per call.
    pub fn next_advice(&mut self, t: usize) -> Result<Vec<Decision>, EnvError> {
        if t != self.round + 1 {
            return Err(EnvError::NonSequentialRound {
                expected: self.round + 1,
                got: t,
            });
        }
        let advice = match &mut self.kind {
            AdviceKind::Constant { values } => {
                values.iter().map(|&v| Decision::new_unchecked(v)).collect()
            }
            AdviceKind::RandomWalk {
                step,
                positions,
                rng,
            } => {
                for x in positions.iter_mut() {
                    let delta = rng.gen_range(-*step..=*step);
                    *x = reflect_unit(*x + delta);
                }
                positions
                    .iter()
                    .map(|&v| Decision::new_unchecked(v))
                    .collect()
            }
            AdviceKind::Fixed { rows } => rows
                .get(t - 1)
                .ok_or(EnvError::AdviceExhausted {
                    t,
                    rounds: rows.len(),
                })?
                .iter()
                .map(|&v| Decision::new_unchecked(v))
                .collect(),
        };
        self.round = t;
        Ok(advice)
    }
}

/// Folds a real into [0, 1] by reflecting at both boundaries.
fn reflect_unit(x: f64) -> f64 {
    let m = x.rem_euclid(2.0);
    if m > 1.0 {
        2.0 - m
    } else {
        m
    }
}
