//! Prediction with expert advice via exponentially weighted averages.
//!
//! The library maintains a pool of N experts and aggregates their advice
//! with weights exponential in cumulative loss, using a learning rate that
//! may shrink over time. Alongside the forecaster itself it ships:
//!
//! - [`schedule`]: rate sequences η_1 ≥ η_2 ≥ … > 0, including the tuned
//!   √(4 ln N / t) decay whose regret guarantee is √(n ln N);
//! - [`bounds`]: closed-form regret bounds and their comparison;
//! - [`ledger`]: a runtime certifier that recomputes, on every round of a
//!   real run, each inequality the regret guarantee is built from, and
//!   hard-fails if any is violated beyond tolerance;
//! - [`environment`]: loss functions, outcome adversaries (including a
//!   greedy worst-case one), and advice generators;
//! - [`experiment`]: a deterministic experiment runner behind the `ewaf`
//!   CLI, emitting per-round trajectories and bound reports as CSV or JSON.

pub mod bounds;
pub mod environment;
pub mod experiment;
pub mod forecaster;
pub mod ledger;
mod numeric;
pub mod schedule;

pub use bounds::{bound_comparison, bound_corollary, bound_time_varying, BoundReport};
pub use environment::{Adversary, AdviceGenerator, LossFunction};
pub use forecaster::{Decision, Forecaster, Outcome, RoundRecord, WeightVector};
pub use ledger::{ProofLedger, ProofLedgerRow};
pub use schedule::LearningRateSchedule;
