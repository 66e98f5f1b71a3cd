//! The experiment loop: drive the forecaster against its environment, check
//! the regret bound on every prefix, and optionally certify every round.

use std::fmt;

use serde::Serialize;

use crate::bounds::{compare_bounds, BoundReport, BoundsError, RUN_TOLERANCE};
use crate::environment::EnvError;
use crate::forecaster::{Forecaster, ForecasterError};
use crate::ledger::{LedgerError, LedgerSummary, ProofLedger};
use crate::numeric::KahanSum;

use super::config::{ConfigError, ExperimentConfig};

/// One emitted row per completed round.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: usize,
    pub eta: f64,
    pub prediction: f64,
    pub outcome: f64,
    pub forecaster_loss: f64,
    pub cumulative_forecaster_loss: f64,
    pub min_cumulative_expert_loss: f64,
    pub regret: f64,
    /// The time-varying bound evaluated at horizon t; the guarantee holds on
    /// every prefix, so each row carries its own bound.
    pub regret_bound: f64,
    /// Mean certificate score after this round; present when verification is
    /// enabled.
    pub ledger_mass: Option<f64>,
}

/// Resolved configuration, echoed into the output for self-description.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub experts: usize,
    pub horizon: usize,
    pub schedule: String,
    pub loss: String,
    pub adversary: String,
    pub advice: String,
    pub seed: u64,
    pub verify: bool,
    pub format: String,
}

impl From<&ExperimentConfig> for ConfigEcho {
    fn from(config: &ExperimentConfig) -> Self {
        Self {
            experts: config.num_experts,
            horizon: config.horizon,
            schedule: config.schedule.to_string(),
            loss: config.loss.to_string(),
            adversary: config.adversary.to_string(),
            advice: config.advice.to_string(),
            seed: config.seed,
            verify: config.verify,
            format: config.format.to_string(),
        }
    }
}

/// Everything a run produces; serializes directly as the JSON document.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub config: ConfigEcho,
    pub schedule_warnings: Vec<String>,
    pub rows: Vec<TrajectoryRow>,
    pub bound_report: BoundReport,
    pub ledger_summary: Option<LedgerSummary>,
}

/// A failed bound or certificate check during a run.
#[derive(Clone, Debug, PartialEq)]
pub enum VerificationError {
    /// Realized regret exceeded the prefix bound beyond tolerance.
    BoundExceeded {
        round: usize,
        regret: f64,
        bound: f64,
    },
    Ledger(LedgerError),
}

impl fmt::Display for VerificationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BoundExceeded {
                round,
                regret,
                bound,
            } => write!(
                f,
                "round {round}: regret {regret} exceeds the bound {bound}"
            ),
            Self::Ledger(e) => write!(f, "certificate check failed: {e}"),
        }
    }
}

impl std::error::Error for VerificationError {}

#[derive(Clone, Debug, PartialEq)]
pub enum RunError {
    Config(ConfigError),
    Verification(VerificationError),
    /// A generator failed mid-run; preflight validation makes this
    /// unreachable for well-formed configs.
    Env(EnvError),
    Forecaster(ForecasterError),
    Bounds(BoundsError),
}

impl RunError {
    /// Process exit code mapping: config errors and verification failures
    /// are distinguishable by code.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => super::EXIT_CONFIG_ERROR,
            Self::Verification(_) => super::EXIT_VERIFICATION_FAILURE,
            _ => super::EXIT_RUNTIME_ERROR,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(e) => write!(f, "config: {e}"),
            Self::Verification(e) => write!(f, "verification: {e}"),
            Self::Env(e) => write!(f, "environment: {e}"),
            Self::Forecaster(e) => write!(f, "forecaster: {e}"),
            Self::Bounds(e) => write!(f, "bounds: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<EnvError> for RunError {
    fn from(e: EnvError) -> Self {
        Self::Env(e)
    }
}

impl From<ForecasterError> for RunError {
    fn from(e: ForecasterError) -> Self {
        Self::Forecaster(e)
    }
}

impl From<BoundsError> for RunError {
    fn from(e: BoundsError) -> Self {
        Self::Bounds(e)
    }
}

/// Runs one experiment to completion.
///
/// Deterministic for a fixed config: the seed fixes both streams, and every
/// row is a pure function of the run so far. Fails with a
/// [`VerificationError`] the moment any prefix bound or certificate check
/// breaks; nothing is emitted for failed runs.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, RunError> {
    let mut prepared = config.prepare()?;
    let mut forecaster =
        Forecaster::new(config.num_experts, prepared.schedule.clone(), prepared.loss)?;
    let mut ledger = config.verify.then(|| ProofLedger::new(config.num_experts));

    let ln_n = (config.num_experts as f64).ln();
    let mut eta_running = KahanSum::new();
    let mut rows = Vec::with_capacity(config.horizon);

    for t in 1..=config.horizon {
        let advice = prepared.advice.next_advice(t)?;
        let prediction = forecaster.predict(&advice)?;
        let outcome = prepared.adversary.next_outcome(prediction)?;
        let record = forecaster.step(&advice, outcome)?;

        // Prefix bound, built incrementally: the Kahan stream over η_1..η_t
        // matches a fresh summation bit for bit.
        eta_running.add(record.eta);
        let regret_bound = ln_n / record.eta + eta_running.value() / 8.0;
        let regret = forecaster.regret();
        if regret > regret_bound + RUN_TOLERANCE {
            return Err(RunError::Verification(VerificationError::BoundExceeded {
                round: t,
                regret,
                bound: regret_bound,
            }));
        }

        let ledger_mass = match ledger.as_mut() {
            Some(ledger) => Some(
                ledger
                    .observe(&record)
                    .map_err(|e| RunError::Verification(VerificationError::Ledger(e)))?
                    .mass,
            ),
            None => None,
        };

        let min_cumulative_expert_loss = forecaster
            .cumulative_expert_losses()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        rows.push(TrajectoryRow {
            t,
            eta: record.eta,
            prediction: record.prediction.value(),
            outcome: record.outcome.value(),
            forecaster_loss: record.forecaster_loss,
            cumulative_forecaster_loss: forecaster.cumulative_forecaster_loss(),
            min_cumulative_expert_loss,
            regret,
            regret_bound,
            ledger_mass,
        });
    }

    let bound_report = compare_bounds(
        &prepared.schedule,
        config.num_experts,
        config.horizon,
        Some(forecaster.regret()),
    )?;

    Ok(ExperimentResult {
        config: ConfigEcho::from(config),
        schedule_warnings: prepared.warnings.iter().map(|w| w.to_string()).collect(),
        rows,
        bound_report,
        ledger_summary: ledger.map(|l| l.summary()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::{
        AdversarySpec, AdviceSpec, LossKind, OutputFormat, ScheduleSpec,
    };
    use crate::experiment::{EXIT_CONFIG_ERROR, EXIT_RUNTIME_ERROR, EXIT_VERIFICATION_FAILURE};

    fn base_config() -> ExperimentConfig {
        ExperimentConfig {
            num_experts: 2,
            horizon: 100,
            schedule: ScheduleSpec::Sqrt4,
            loss: LossKind::Absolute,
            adversary: AdversarySpec::Adaptive,
            advice: AdviceSpec::Constant(vec![0.0, 1.0]),
            seed: 7,
            verify: true,
            format: OutputFormat::Csv,
            out: None,
        }
    }

    #[test]
    fn adaptive_run_respects_the_corollary_bound() {
        let result = run_experiment(&base_config()).unwrap();
        assert_eq!(result.rows.len(), 100);
        let final_regret = result.rows.last().unwrap().regret;
        // √(100 ln 2), the tuned-schedule guarantee at the full horizon.
        assert!(final_regret <= 8.325_546_111_576_978 + 1e-6);
        assert_eq!(result.bound_report.realized_regret, Some(final_regret));
        assert!(!result.bound_report.violation);
        assert!(result.ledger_summary.is_some());
    }

    #[test]
    fn every_row_satisfies_its_prefix_bound_and_echoes_state() {
        let result = run_experiment(&base_config()).unwrap();
        let mut previous_cumulative = 0.0;
        for row in &result.rows {
            assert!(row.regret <= row.regret_bound + RUN_TOLERANCE);
            assert!(row.cumulative_forecaster_loss >= previous_cumulative);
            previous_cumulative = row.cumulative_forecaster_loss;
            assert!(row.ledger_mass.unwrap() <= 1.0 + 1e-9);
            assert!((0.0..=1.0).contains(&row.prediction));
        }
    }

    #[test]
    fn runs_are_deterministic_for_a_fixed_seed() {
        let mut config = base_config();
        config.advice = AdviceSpec::Walk(0.2);
        config.adversary = AdversarySpec::Bernoulli(0.5);
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a, b);

        config.seed = 8;
        let c = run_experiment(&config).unwrap();
        assert_ne!(a.rows, c.rows);
    }

    #[test]
    fn prefix_bounds_match_the_bounds_module() {
        let config = base_config();
        let result = run_experiment(&config).unwrap();
        let schedule = config.schedule.build(config.num_experts).unwrap();
        for t in [1usize, 7, 50, 100] {
            let direct =
                crate::bounds::bound_time_varying(&schedule, config.num_experts, t).unwrap();
            let row = &result.rows[t - 1];
            assert_eq!(row.regret_bound, direct);
        }
    }

    #[test]
    fn verification_can_be_disabled() {
        let mut config = base_config();
        config.verify = false;
        let result = run_experiment(&config).unwrap();
        assert!(result.ledger_summary.is_none());
        assert!(result.rows.iter().all(|r| r.ledger_mass.is_none()));
    }

    #[test]
    fn config_errors_carry_the_config_exit_code() {
        let mut config = base_config();
        config.advice = AdviceSpec::Constant(vec![0.5]);
        let err = run_experiment(&config).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_CONFIG_ERROR);
    }

    #[test]
    fn exit_codes_distinguish_failure_classes() {
        let config_err = RunError::Config(ConfigError::MissingKey { key: "experts" });
        assert_eq!(config_err.exit_code(), EXIT_CONFIG_ERROR);
        let verify_err = RunError::Verification(VerificationError::BoundExceeded {
            round: 3,
            regret: 2.0,
            bound: 1.0,
        });
        assert_eq!(verify_err.exit_code(), EXIT_VERIFICATION_FAILURE);
        let env_err = RunError::Env(EnvError::OutcomesExhausted { len: 3 });
        assert_eq!(env_err.exit_code(), EXIT_RUNTIME_ERROR);
    }
}
