//! Output rendering: trajectory CSV/JSON and the bound table.
//!
//! CSV floats are printed with 17 significant digits so every value
//! round-trips losslessly; JSON uses serde's shortest-round-trip encoding.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bounds::{bound_comparison, bound_corollary, bound_time_varying};

use super::config::{BoundTableRequest, ScheduleSpec};
use super::runner::{ExperimentResult, RunError};

/// 17 significant digits: exact round-trip for f64.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

const TRAJECTORY_HEADER: &str = "t,eta,prediction,outcome,forecaster_loss,\
cumulative_forecaster_loss,min_cumulative_expert_loss,regret,regret_bound,ledger_mass";

/// The trajectory as CSV: one header row, one row per round, fixed columns.
/// The ledger_mass column is left empty when verification was off.
pub fn render_trajectory_csv(result: &ExperimentResult) -> String {
    let mut out = String::new();
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for row in &result.rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.t,
            fmt_float(row.eta),
            fmt_float(row.prediction),
            fmt_float(row.outcome),
            fmt_float(row.forecaster_loss),
            fmt_float(row.cumulative_forecaster_loss),
            fmt_float(row.min_cumulative_expert_loss),
            fmt_float(row.regret),
            fmt_float(row.regret_bound),
            row.ledger_mass.map(fmt_float).unwrap_or_default(),
        );
        out.push('\n');
    }
    out
}

/// The whole run as one JSON document: config echo, rows, bound report, and
/// the ledger summary when verification ran.
pub fn trajectory_json(result: &ExperimentResult) -> String {
    let mut text = serde_json::to_string_pretty(result).expect("result serializes");
    text.push('\n');
    text
}

/// One bound-table cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTableRow {
    pub schedule: String,
    pub num_experts: usize,
    pub horizon: usize,
    pub bound_time_varying: f64,
    pub bound_comparison: f64,
    /// √(n ln N); only for the tuned √-decay schedule.
    pub bound_corollary: Option<f64>,
    /// bound_comparison / bound_time_varying; 1 exactly when the rate is
    /// constant, above 1 whenever the rate actually decays.
    pub ratio: f64,
}

/// Evaluates the bound grid over schedules × experts × horizons, in that
/// nesting order with experts and horizons ascending.
pub fn bound_table(request: &BoundTableRequest) -> Result<Vec<BoundTableRow>, RunError> {
    let mut rows = Vec::new();
    for spec in &request.schedules {
        for &num_experts in &request.experts {
            let schedule = spec.build(num_experts).map_err(RunError::Config)?;
            for &horizon in &request.horizons {
                let tv = bound_time_varying(&schedule, num_experts, horizon)?;
                let cmp = bound_comparison(&schedule, num_experts, horizon)?;
                let corollary = match spec {
                    ScheduleSpec::Sqrt4 => Some(bound_corollary(num_experts, horizon)?),
                    _ => None,
                };
                rows.push(BoundTableRow {
                    schedule: spec.to_string(),
                    num_experts,
                    horizon,
                    bound_time_varying: tv,
                    bound_comparison: cmp,
                    bound_corollary: corollary,
                    ratio: cmp / tv,
                });
            }
        }
    }
    Ok(rows)
}

const TABLE_HEADER: &str =
    "schedule,num_experts,horizon,bound_time_varying,bound_comparison,bound_corollary,ratio";

pub fn write_bound_table_csv(rows: &[BoundTableRow]) -> String {
    let mut out = String::new();
    out.push_str(TABLE_HEADER);
    out.push('\n');
    for row in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            row.schedule,
            row.num_experts,
            row.horizon,
            fmt_float(row.bound_time_varying),
            fmt_float(row.bound_comparison),
            row.bound_corollary.map(fmt_float).unwrap_or_default(),
            fmt_float(row.ratio),
        );
        out.push('\n');
    }
    out
}

pub fn bound_table_json(rows: &[BoundTableRow]) -> String {
    #[derive(Serialize)]
    struct Document<'a> {
        rows: &'a [BoundTableRow],
    }
    let mut text = serde_json::to_string_pretty(&Document { rows }).expect("rows serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::OutputFormat;
    use crate::experiment::{
        run_experiment, AdversarySpec, AdviceSpec, ExperimentConfig, LossKind,
    };

    #[test]
    fn float_format_round_trips_exactly() {
        for x in [
            0.5,
            1.0 / 3.0,
            8.325_546_111_576_978,
            1e-300,
            0.0,
            123456.789,
        ] {
            let parsed: f64 = fmt_float(x).parse().unwrap();
            assert_eq!(parsed, x, "{x} did not round-trip");
        }
    }

    fn small_run() -> ExperimentResult {
        run_experiment(&ExperimentConfig {
            num_experts: 2,
            horizon: 3,
            schedule: ScheduleSpec::Sqrt4,
            loss: LossKind::Absolute,
            adversary: AdversarySpec::Adaptive,
            advice: AdviceSpec::Constant(vec![0.0, 1.0]),
            seed: 1,
            verify: true,
            format: OutputFormat::Csv,
            out: None,
        })
        .unwrap()
    }

    #[test]
    fn csv_has_header_plus_one_row_per_round() {
        let csv = render_trajectory_csv(&small_run());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], TRAJECTORY_HEADER);
        // 10 columns on every row, all populated with verification on.
        for line in &lines[1..] {
            assert_eq!(line.split(',').count(), 10);
            assert!(!line.ends_with(','));
        }
    }

    #[test]
    fn csv_leaves_ledger_mass_empty_without_verification() {
        let mut result = small_run();
        for row in &mut result.rows {
            row.ledger_mass = None;
        }
        let csv = render_trajectory_csv(&result);
        for line in csv.lines().skip(1) {
            assert!(line.ends_with(','));
        }
    }

    #[test]
    fn json_document_carries_all_sections() {
        let json = trajectory_json(&small_run());
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(doc["config"]["experts"], 2);
        assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
        assert!(doc["bound_report"]["bound_time_varying"].is_f64());
        assert!(doc["ledger_summary"]["max_mass"].is_f64());
    }

    #[test]
    fn bound_table_covers_the_grid_with_dominance_ratios() {
        let request = BoundTableRequest {
            experts: vec![2, 8],
            horizons: vec![10, 1000],
            schedules: vec![ScheduleSpec::Sqrt4],
            format: OutputFormat::Csv,
            out: None,
        };
        let rows = bound_table(&request).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            // Decaying rates: the comparison bound is strictly worse.
            assert!(row.ratio > 1.0);
            let corollary = row.bound_corollary.unwrap();
            assert!(row.bound_time_varying <= corollary + 1e-9);
        }
    }

    #[test]
    fn constant_schedule_rows_have_unit_ratio() {
        let request = BoundTableRequest {
            experts: vec![2],
            horizons: vec![10, 100],
            schedules: vec![ScheduleSpec::Constant(0.5)],
            format: OutputFormat::Csv,
            out: None,
        };
        for row in bound_table(&request).unwrap() {
            assert!((row.ratio - 1.0).abs() <= 1e-12);
            assert!(row.bound_corollary.is_none());
        }
    }

    #[test]
    fn classic_and_tuned_schedules_share_a_table_for_contrast() {
        let request = BoundTableRequest {
            experts: vec![2],
            horizons: vec![100],
            schedules: vec![ScheduleSpec::Sqrt4, ScheduleSpec::Sqrt8],
            format: OutputFormat::Csv,
            out: None,
        };
        let rows = bound_table(&request).unwrap();
        assert_eq!(rows.len(), 2);
        // The tuned schedule's guarantee beats the classic schedule's at the
        // same grid point.
        assert!(rows[0].bound_time_varying < rows[1].bound_time_varying);
    }

    #[test]
    fn table_csv_is_well_formed() {
        let request = BoundTableRequest {
            experts: vec![2],
            horizons: vec![10],
            schedules: vec![ScheduleSpec::Sqrt4, ScheduleSpec::Constant(0.5)],
            format: OutputFormat::Csv,
            out: None,
        };
        let rows = bound_table(&request).unwrap();
        let csv = write_bound_table_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TABLE_HEADER);
        assert_eq!(lines.len(), 3);
        // Constant rows leave the corollary column empty.
        assert!(lines[2].contains(",,"));
    }
}
