//! Trial metrics: pass@k, checkpoint accuracy, question-cost measures, and
//! grouped breakdown reports.

mod estimators;
mod report;

pub use estimators::{
    ask_rate, avg_questions_per_asking_trajectory, checkpoint_accuracy, gain_per_question,
    pass_at_k, total_questions,
};
pub use report::{
    breakdown_report, render_table, to_plot_series, BreakdownReport, GroupKey, PlotPoint,
    ReportRow, VariantOutcome,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    /// Inputs violated a precondition (k out of range, empty trial set,
    /// mismatched checkpoint arity). These are caller bugs, not data.
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

/// Round to one decimal place. Report percentages use this.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Round to two decimal places. Report rates (gain per question) use this.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}
