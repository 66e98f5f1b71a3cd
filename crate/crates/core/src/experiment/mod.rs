//! Experiment harness: configuration, the run loop, and file output.

mod config;
mod output;
mod runner;

pub use config::{
    AdversarySpec, AdviceSpec, BoundTableRequest, ConfigError, ExperimentConfig, LossKind,
    OutputFormat, PreparedExperiment, RawConfig, ScheduleSpec,
};
pub use output::{
    bound_table, bound_table_json, render_trajectory_csv, trajectory_json, write_bound_table_csv,
    BoundTableRow,
};
pub use runner::{
    run_experiment, ConfigEcho, ExperimentResult, RunError, TrajectoryRow, VerificationError,
};

/// Process exit code for configuration errors.
pub const EXIT_CONFIG_ERROR: i32 = 2;
/// Process exit code for a failed bound or ledger check.
pub const EXIT_VERIFICATION_FAILURE: i32 = 3;
/// Process exit code for unexpected runtime failures (I/O and the like).
pub const EXIT_RUNTIME_ERROR: i32 = 1;
