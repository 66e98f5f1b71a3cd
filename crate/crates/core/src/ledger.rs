//! Round-by-round certification of the quantities behind the regret bound.
//!
//! For each expert i and round t, define the score
//!
//! ```text
//! s_{i,t} = exp(−η_t L_{i,t} + η_t L̂_t − (η_t/8) Σ_{k≤t} η_k),    s_{i,0} = 1.
//! ```
//!
//! The regret bound rests on the uniform average (1/N) Σ_j s_{j,t} staying
//! at most 1 for every round, which in turn rests on three per-round facts:
//! an exponential-moment (Hoeffding) inequality relating the forecaster's
//! loss to the weighted expert losses, a power-mean inequality absorbing the
//! rate change between rounds, and the identity expressing the round's
//! weights as normalized powers of the previous scores. [`check_round`]
//! recomputes all of them on the actual run and hard-fails, naming the
//! inequality and round, if any is violated beyond tolerance.
//!
//! Scores are kept in the log domain end to end: the average never exceeds 1,
//! but individual terms underflow long before runs of interesting length
//! finish. The recursion
//!
//! ```text
//! s_{i,t} = (s_{i,t−1})^{η_t/η_{t−1}} · exp(−η_t ℓ_i + η_t ℓ̂ − η_t²/8)
//! ```
//!
//! is the object actually tracked; every round it is cross-checked against
//! the closed form above ([`s_recursive_step`] vs [`s_closed_form`]), so a
//! drift in either path is caught immediately. The rate for round 0 is not
//! defined; the recursion takes η_0 := η_1, which is inert because every
//! s_{i,0} = 1.

use std::fmt;

use serde::Serialize;

use crate::forecaster::RoundRecord;
use crate::numeric::log_sum_exp;

/// Tolerance for single-step algebraic identities (Hoeffding, power-mean).
pub const STEP_TOLERANCE: f64 = 1e-12;

/// Tolerance for quantities accumulated across rounds (mass, weight
/// recomputation, recursion-vs-closed-form residual); error grows roughly
/// linearly in the horizon.
pub const ACCUMULATED_TOLERANCE: f64 = 1e-9;

/// One certified round: the log-domain scores plus every checked quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofLedgerRow {
    /// 0 for the induction base, otherwise the round just checked.
    pub round: usize,
    /// η_t for this row; 0 on the base row, which has no rate.
    pub eta: f64,
    /// Σ_{k≤t} η_k, accumulated in round order.
    pub eta_sum: f64,
    /// Cumulative expert losses L_{i,t}, tracked for the closed form.
    pub cumulative_expert_losses: Vec<f64>,
    /// Cumulative forecaster loss L̂_t.
    pub cumulative_forecaster_loss: f64,
    /// log s_{i,t} from the recursion.
    pub log_s: Vec<f64>,
    /// (1/N) Σ_j s_{j,t}, via log-sum-exp.
    pub mass: f64,
    /// exp(−η_t ℓ̂_t): must be ≥ `hoeffding_rhs` − tolerance.
    pub hoeffding_lhs: f64,
    /// Σ_i q_i exp(−η_t ℓ_i − η_t²/8) with q the round's weights.
    pub hoeffding_rhs: f64,
    /// Σ_j (1/N)(s_{j,t−1})^α: must be ≤ `powermean_rhs` + tolerance.
    pub powermean_lhs: f64,
    /// (Σ_j (1/N) s_{j,t−1})^α, α = η_t/η_{t−1}.
    pub powermean_rhs: f64,
    /// max_i |log s_i via recursion − log s_i via closed form|.
    pub recursion_residual: f64,
}

impl ProofLedgerRow {
    /// The induction base at t = 0: every score is 1, so the mass is exactly
    /// 1 and all checked quantities are trivially in balance.
    pub fn base(num_experts: usize) -> Self {
        Self {
            round: 0,
            eta: 0.0,
            eta_sum: 0.0,
            cumulative_expert_losses: vec![0.0; num_experts],
            cumulative_forecaster_loss: 0.0,
            log_s: vec![0.0; num_experts],
            mass: 1.0,
            hoeffding_lhs: 1.0,
            hoeffding_rhs: 1.0,
            powermean_lhs: 1.0,
            powermean_rhs: 1.0,
            recursion_residual: 0.0,
        }
    }
}

/// A failed certification, naming the inequality and the round.
#[derive(Clone, Debug, PartialEq)]
pub enum LedgerError {
    /// Round t is not covered by the supplied history.
    HistoryTooShort { t: usize, len: usize },
    /// Rates must satisfy η_{t−1} ≥ η_t > 0.
    ScheduleViolation {
        round: usize,
        eta_prev: f64,
        eta: f64,
    },
    /// Rows must be fed in round order.
    RoundMismatch { expected: usize, got: usize },
    /// Expert count changed between the row and the record.
    LengthMismatch { expected: usize, got: usize },
    /// (1/N) Σ_j s_{j,t} exceeded 1 beyond tolerance.
    MassExceeded { round: usize, mass: f64 },
    /// The exponential-moment inequality failed.
    HoeffdingViolated { round: usize, lhs: f64, rhs: f64 },
    /// The power-mean inequality failed.
    PowerMeanViolated { round: usize, lhs: f64, rhs: f64 },
    /// Weights recomputed from the scores disagree with the round's weights.
    WeightMismatch { round: usize, max_abs_diff: f64 },
    /// The recursion drifted away from the closed form.
    RecursionDivergence { round: usize, residual: f64 },
}

impl fmt::Display for LedgerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HistoryTooShort { t, len } => {
                write!(f, "round {t} is not covered by a {len}-round history")
            }
            Self::ScheduleViolation {
                round,
                eta_prev,
                eta,
            } => write!(
                f,
                "round {round}: rate went from {eta_prev} up to {eta}; rates must not increase"
            ),
            Self::RoundMismatch { expected, got } => {
                write!(f, "expected record for round {expected}, got {got}")
            }
            Self::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} experts, got {got}")
            }
            Self::MassExceeded { round, mass } => {
                write!(f, "round {round}: mean score {mass} exceeds 1")
            }
            Self::HoeffdingViolated { round, lhs, rhs } => write!(
                f,
                "round {round}: exponential-moment inequality violated: {lhs} < {rhs}"
            ),
            Self::PowerMeanViolated { round, lhs, rhs } => write!(
                f,
                "round {round}: power-mean inequality violated: {lhs} > {rhs}"
            ),
            Self::WeightMismatch {
                round,
                max_abs_diff,
            } => write!(
                f,
                "round {round}: weights recomputed from scores differ by {max_abs_diff}"
            ),
            Self::RecursionDivergence { round, residual } => write!(
                f,
                "round {round}: recursion drifted {residual} from the closed form"
            ),
        }
    }
}

impl std::error::Error for LedgerError {}

/// log s_{i,t} from cumulative quantities; shared by [`s_closed_form`] and
/// [`check_round`] so both paths round identically.
fn closed_form_log_s(
    eta: f64,
    cumulative_expert_losses: &[f64],
    cumulative_forecaster_loss: f64,
    eta_sum: f64,
) -> Vec<f64> {
    cumulative_expert_losses
        .iter()
        .map(|l| -eta * l + eta * cumulative_forecaster_loss - eta / 8.0 * eta_sum)
        .collect()
}

/// log s_{i,t} evaluated directly from the definition over rounds 1..=t.
/// At t = 0 every score is 1, so the result is all zeros.
pub fn s_closed_form(history: &[RoundRecord], t: usize) -> Result<Vec<f64>, LedgerError> {
    if t > history.len() {
        return Err(LedgerError::HistoryTooShort {
            t,
            len: history.len(),
        });
    }
    let num_experts = history.first().map_or(0, |r| r.expert_losses.len());
    if t == 0 {
        return Ok(vec![0.0; num_experts]);
    }
    let mut cumulative_expert_losses = vec![0.0; num_experts];
    let mut cumulative_forecaster_loss = 0.0;
    let mut eta_sum = 0.0;
    for record in &history[..t] {
        if record.expert_losses.len() != num_experts {
            return Err(LedgerError::LengthMismatch {
                expected: num_experts,
                got: record.expert_losses.len(),
            });
        }
        for (cum, l) in cumulative_expert_losses
            .iter_mut()
            .zip(&record.expert_losses)
        {
            *cum += l;
        }
        cumulative_forecaster_loss += record.forecaster_loss;
        eta_sum += record.eta;
    }
    let eta = history[t - 1].eta;
    Ok(closed_form_log_s(
        eta,
        &cumulative_expert_losses,
        cumulative_forecaster_loss,
        eta_sum,
    ))
}

/// One step of the score recursion in the log domain:
/// log s_{i,t} = (η_t/η_{t−1})·log s_{i,t−1} − η_t ℓ_i + η_t ℓ̂ − η_t²/8.
pub fn s_recursive_step(
    prev_log_s: &[f64],
    record: &RoundRecord,
    eta_prev: f64,
) -> Result<Vec<f64>, LedgerError> {
    if record.expert_losses.len() != prev_log_s.len() {
        return Err(LedgerError::LengthMismatch {
            expected: prev_log_s.len(),
            got: record.expert_losses.len(),
        });
    }
    let eta = record.eta;
    if eta.is_nan() || eta <= 0.0 || eta_prev < eta {
        return Err(LedgerError::ScheduleViolation {
            round: record.round,
            eta_prev,
            eta,
        });
    }
    let alpha = eta / eta_prev;
    Ok(prev_log_s
        .iter()
        .zip(&record.expert_losses)
        .map(|(prev, l)| alpha * prev - eta * l + eta * record.forecaster_loss - eta * eta / 8.0)
        .collect())
}

/// Certifies one round and produces the next ledger row.
///
/// `eta_prev` is η_{t−1}; pass the record's own rate at t = 1 (η_0 := η_1).
/// Any inequality violated beyond its tolerance is a hard error naming the
/// inequality and the round.
pub fn check_round(
    prev: &ProofLedgerRow,
    record: &RoundRecord,
    eta_prev: f64,
) -> Result<ProofLedgerRow, LedgerError> {
    let num_experts = prev.log_s.len();
    if record.expert_losses.len() != num_experts || record.weights.len() != num_experts {
        return Err(LedgerError::LengthMismatch {
            expected: num_experts,
            got: record.expert_losses.len(),
        });
    }
    if record.round != prev.round + 1 {
        return Err(LedgerError::RoundMismatch {
            expected: prev.round + 1,
            got: record.round,
        });
    }
    if prev.mass > 1.0 + ACCUMULATED_TOLERANCE {
        return Err(LedgerError::MassExceeded {
            round: prev.round,
            mass: prev.mass,
        });
    }
    let eta = record.eta;
    if eta.is_nan() || eta <= 0.0 || eta_prev < eta {
        return Err(LedgerError::ScheduleViolation {
            round: record.round,
            eta_prev,
            eta,
        });
    }
    let alpha = eta / eta_prev;
    let ln_n = (num_experts as f64).ln();

    // Weight identity: the round's weights must equal the normalized α-powers
    // of the previous scores.
    let scaled: Vec<f64> = prev.log_s.iter().map(|s| alpha * s).collect();
    let max_scaled = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let unnormalized: Vec<f64> = scaled.iter().map(|s| (s - max_scaled).exp()).collect();
    let total: f64 = unnormalized.iter().sum();
    let mut max_abs_diff = 0.0f64;
    for (u, w) in unnormalized.iter().zip(record.weights.as_slice()) {
        max_abs_diff = max_abs_diff.max((u / total - w).abs());
    }
    if max_abs_diff > ACCUMULATED_TOLERANCE {
        return Err(LedgerError::WeightMismatch {
            round: record.round,
            max_abs_diff,
        });
    }

    // Exponential-moment inequality on this round's realized losses.
    let hoeffding_lhs = (-eta * record.forecaster_loss).exp();
    let hoeffding_rhs: f64 = record
        .weights
        .as_slice()
        .iter()
        .zip(&record.expert_losses)
        .map(|(q, l)| q * (-eta * l - eta * eta / 8.0).exp())
        .sum();
    if hoeffding_lhs < hoeffding_rhs - STEP_TOLERANCE {
        return Err(LedgerError::HoeffdingViolated {
            round: record.round,
            lhs: hoeffding_lhs,
            rhs: hoeffding_rhs,
        });
    }

    // Power-mean inequality absorbing the rate change, α = η_t/η_{t−1} ∈ (0, 1].
    let powermean_lhs = (log_sum_exp(&scaled) - ln_n).exp();
    let powermean_rhs = (alpha * (log_sum_exp(&prev.log_s) - ln_n)).exp();
    if powermean_lhs > powermean_rhs + STEP_TOLERANCE {
        return Err(LedgerError::PowerMeanViolated {
            round: record.round,
            lhs: powermean_lhs,
            rhs: powermean_rhs,
        });
    }

    // Advance both score paths and compare them.
    let log_s = s_recursive_step(&prev.log_s, record, eta_prev)?;
    let mut cumulative_expert_losses = prev.cumulative_expert_losses.clone();
    for (cum, l) in cumulative_expert_losses
        .iter_mut()
        .zip(&record.expert_losses)
    {
        *cum += l;
    }
    let cumulative_forecaster_loss = prev.cumulative_forecaster_loss + record.forecaster_loss;
    let eta_sum = prev.eta_sum + eta;
    let closed = closed_form_log_s(
        eta,
        &cumulative_expert_losses,
        cumulative_forecaster_loss,
        eta_sum,
    );
    let recursion_residual = log_s
        .iter()
        .zip(&closed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    if recursion_residual > ACCUMULATED_TOLERANCE {
        return Err(LedgerError::RecursionDivergence {
            round: record.round,
            residual: recursion_residual,
        });
    }

    let mass = (log_sum_exp(&log_s) - ln_n).exp();
    if mass > 1.0 + ACCUMULATED_TOLERANCE {
        return Err(LedgerError::MassExceeded {
            round: record.round,
            mass,
        });
    }

    Ok(ProofLedgerRow {
        round: record.round,
        eta,
        eta_sum,
        cumulative_expert_losses,
        cumulative_forecaster_loss,
        log_s,
        mass,
        hoeffding_lhs,
        hoeffding_rhs,
        powermean_lhs,
        powermean_rhs,
        recursion_residual,
    })
}

/// Sequential certifier: feed every [`RoundRecord`] of a run in order.
#[derive(Clone, Debug)]
pub struct ProofLedger {
    rows: Vec<ProofLedgerRow>,
}

impl ProofLedger {
    pub fn new(num_experts: usize) -> Self {
        Self {
            rows: vec![ProofLedgerRow::base(num_experts)],
        }
    }

    /// Certifies the next round; on success the new row is appended.
    pub fn observe(&mut self, record: &RoundRecord) -> Result<&ProofLedgerRow, LedgerError> {
        let prev = self.rows.last().expect("ledger always holds the base row");
        let eta_prev = if prev.round == 0 {
            record.eta
        } else {
            prev.eta
        };
        let row = check_round(prev, record, eta_prev)?;
        self.rows.push(row);
        Ok(self.rows.last().unwrap())
    }

    /// All rows, base row first.
    pub fn rows(&self) -> &[ProofLedgerRow] {
        &self.rows
    }

    pub fn last(&self) -> &ProofLedgerRow {
        self.rows.last().expect("ledger always holds the base row")
    }

    pub fn summary(&self) -> LedgerSummary {
        let checked = &self.rows[1..];
        let fold_min =
            |f: fn(&ProofLedgerRow) -> f64| checked.iter().map(f).fold(f64::INFINITY, f64::min);
        LedgerSummary {
            rounds: checked.len(),
            max_mass: self.rows.iter().map(|r| r.mass).fold(0.0, f64::max),
            max_recursion_residual: checked
                .iter()
                .map(|r| r.recursion_residual)
                .fold(0.0, f64::max),
            min_hoeffding_margin: (!checked.is_empty())
                .then(|| fold_min(|r| r.hoeffding_lhs - r.hoeffding_rhs)),
            min_powermean_margin: (!checked.is_empty())
                .then(|| fold_min(|r| r.powermean_rhs - r.powermean_lhs)),
            final_log_s_max: self
                .last()
                .log_s
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Aggregate statistics over a certified run, for reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerSummary {
    pub rounds: usize,
    /// Largest observed mean score; at most 1 + tolerance by construction.
    pub max_mass: f64,
    pub max_recursion_residual: f64,
    /// min over rounds of (lhs − rhs); nonnegative up to tolerance. None
    /// before any round was checked.
    pub min_hoeffding_margin: Option<f64>,
    /// min over rounds of (rhs − lhs); nonnegative up to tolerance.
    pub min_powermean_margin: Option<f64>,
    /// max_i log s_{i,n}; the regret bound is equivalent to this staying
    /// below ln N.
    pub final_log_s_max: f64,
}
