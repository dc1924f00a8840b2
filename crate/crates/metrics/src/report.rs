//! Grouped breakdown reports over trial outcomes.
//!
//! A report row aggregates one group (a dataset, an agent config, an
//! information dimension, an ambiguity class, or a persona). Groups drawn
//! from closed enums always appear, so a dimension with no variants shows
//! up as an explicit empty row rather than silently vanishing.

use crate::{
    ask_rate, avg_questions_per_asking_trajectory, checkpoint_accuracy, gain_per_question,
    pass_at_k, round1, round2, total_questions, MetricsError,
};
use serde::Serialize;
use std::collections::BTreeMap;
use underspec_core::{AmbiguityClass, Dimension, TrialRecord};

/// Trials for one variant, tagged with everything reports can group by.
#[derive(Debug, Clone)]
pub struct VariantOutcome {
    pub variant_id: String,
    pub dataset: String,
    pub agent_config_id: String,
    pub dimension: Option<Dimension>,
    pub ambiguity_class: Option<AmbiguityClass>,
    pub persona: Option<String>,
    pub trials: Vec<TrialRecord>,
}

/// Field a report groups rows by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    Dataset,
    AgentConfig,
    Dimension,
    AmbiguityClass,
    Persona,
    /// Single row covering everything.
    Overall,
}

impl GroupKey {
    pub fn parse(s: &str) -> Option<GroupKey> {
        match s {
            "dataset" => Some(GroupKey::Dataset),
            "agent_config" => Some(GroupKey::AgentConfig),
            "dimension" => Some(GroupKey::Dimension),
            "ambiguity_class" => Some(GroupKey::AmbiguityClass),
            "persona" => Some(GroupKey::Persona),
            "overall" => Some(GroupKey::Overall),
            _ => None,
        }
    }

    fn value_of(self, v: &VariantOutcome) -> String {
        match self {
            GroupKey::Dataset => v.dataset.clone(),
            GroupKey::AgentConfig => v.agent_config_id.clone(),
            GroupKey::Dimension => v
                .dimension
                .map(|d| d.to_string())
                .unwrap_or_else(|| "unknown".into()),
            GroupKey::AmbiguityClass => v
                .ambiguity_class
                .map(|c| c.to_string())
                .unwrap_or_else(|| "unclassified".into()),
            GroupKey::Persona => v.persona.clone().unwrap_or_else(|| "none".into()),
            GroupKey::Overall => "all".into(),
        }
    }

    /// Closed key domains, enumerated so empty groups still get rows.
    fn fixed_domain(self) -> Option<Vec<String>> {
        match self {
            GroupKey::Dimension => Some(
                Dimension::ALL
                    .iter()
                    .map(|d| d.to_string())
                    .collect(),
            ),
            GroupKey::AmbiguityClass => Some(
                [
                    AmbiguityClass::OutcomeCritical,
                    AmbiguityClass::Divergent,
                    AmbiguityClass::Benign,
                ]
                .iter()
                .map(|c| c.to_string())
                .collect(),
            ),
            _ => None,
        }
    }
}

/// Aggregates for one group. Percent-valued fields are percentages in
/// [0, 100]; `None` means the group was empty (rendered as `--`).
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub group: String,
    pub n_variants: usize,
    pub n_trials: usize,
    pub pass_at_k_pct: Option<f64>,
    pub checkpoint_accuracy_pct: Option<f64>,
    pub ask_rate_pct: Option<f64>,
    pub avg_questions_per_asking_trajectory: Option<f64>,
    pub total_questions: u64,
    /// Percentage-point pass@k gain per question vs the paired baseline run.
    pub gain_per_question_pass: Option<f64>,
    /// Percentage-point checkpoint-accuracy gain per question vs baseline.
    pub gain_per_question_ckpt: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BreakdownReport {
    pub group_key: GroupKey,
    pub k: u64,
    pub rows: Vec<ReportRow>,
}

/// Builds a grouped report.
///
/// `baseline` is an optional paired run of the same variants without the
/// user tool; when present, gain-per-question columns are filled from the
/// difference between the runs over the main run's question totals.
pub fn breakdown_report(
    outcomes: &[VariantOutcome],
    baseline: Option<&[VariantOutcome]>,
    group_key: GroupKey,
    k: u64,
) -> Result<BreakdownReport, MetricsError> {
    let mut groups: BTreeMap<String, Vec<&VariantOutcome>> = BTreeMap::new();
    for v in outcomes {
        groups.entry(group_key.value_of(v)).or_default().push(v);
    }
    let mut baseline_groups: BTreeMap<String, Vec<&VariantOutcome>> = BTreeMap::new();
    if let Some(base) = baseline {
        for v in base {
            baseline_groups
                .entry(group_key.value_of(v))
                .or_default()
                .push(v);
        }
    }

    // closed domains list every value; open domains list observed values
    let keys: Vec<String> = match group_key.fixed_domain() {
        Some(domain) => {
            let mut keys = domain;
            for k in groups.keys() {
                if !keys.contains(k) {
                    keys.push(k.clone());
                }
            }
            keys
        }
        None => groups.keys().cloned().collect(),
    };

    let mut rows = Vec::new();
    for key in keys {
        let members = groups.get(&key).map(Vec::as_slice).unwrap_or(&[]);
        if members.is_empty() {
            rows.push(ReportRow {
                group: key,
                n_variants: 0,
                n_trials: 0,
                pass_at_k_pct: None,
                checkpoint_accuracy_pct: None,
                ask_rate_pct: None,
                avg_questions_per_asking_trajectory: None,
                total_questions: 0,
                gain_per_question_pass: None,
                gain_per_question_ckpt: None,
            });
            continue;
        }
        let stats = group_stats(members, k)?;
        let base_stats = match baseline_groups.get(&key) {
            Some(base) if !base.is_empty() => Some(group_stats(base, k)?),
            _ => None,
        };
        let (gain_pass, gain_ckpt) = match &base_stats {
            Some(base) => (
                Some(round2(gain_per_question(
                    stats.pass_pct,
                    base.pass_pct,
                    stats.questions,
                ))),
                Some(round2(gain_per_question(
                    stats.ckpt_pct,
                    base.ckpt_pct,
                    stats.questions,
                ))),
            ),
            None => (None, None),
        };
        rows.push(ReportRow {
            group: key,
            n_variants: members.len(),
            n_trials: stats.n_trials,
            pass_at_k_pct: Some(round1(stats.pass_pct)),
            checkpoint_accuracy_pct: Some(round1(stats.ckpt_pct)),
            ask_rate_pct: Some(round1(stats.ask_pct)),
            avg_questions_per_asking_trajectory: Some(round1(stats.avg_questions)),
            total_questions: stats.questions,
            gain_per_question_pass: gain_pass,
            gain_per_question_ckpt: gain_ckpt,
        });
    }
    Ok(BreakdownReport { group_key, k, rows })
}

struct GroupStats {
    n_trials: usize,
    pass_pct: f64,
    ckpt_pct: f64,
    ask_pct: f64,
    avg_questions: f64,
    questions: u64,
}

fn group_stats(members: &[&VariantOutcome], k: u64) -> Result<GroupStats, MetricsError> {
    let mut pass_sum = 0.0;
    let mut all_trials: Vec<TrialRecord> = Vec::new();
    for v in members {
        let n = v.trials.len() as u64;
        let c = v.trials.iter().filter(|t| t.success).count() as u64;
        pass_sum += pass_at_k(n, c, k)?;
        all_trials.extend(v.trials.iter().cloned());
    }
    Ok(GroupStats {
        n_trials: all_trials.len(),
        pass_pct: 100.0 * pass_sum / members.len() as f64,
        ckpt_pct: 100.0 * checkpoint_accuracy(&all_trials)?,
        ask_pct: 100.0 * ask_rate(&all_trials)?,
        avg_questions: avg_questions_per_asking_trajectory(&all_trials),
        questions: total_questions(&all_trials),
    })
}

// --- rendering --------------------------------------------------------------

const EMPTY_CELL: &str = "--";

/// Fixed-width text table, one row per group.
pub fn render_table(report: &BreakdownReport) -> String {
    let headers = [
        "group",
        "variants",
        "trials",
        &format!("pass@{}%", report.k),
        "ckpt%",
        "ask%",
        "avg_q",
        "questions",
        "gain/q(pass)",
        "gain/q(ckpt)",
    ]
    .map(String::from);

    let mut table: Vec<Vec<String>> = vec![headers.to_vec()];
    for row in &report.rows {
        let fmt1 = |v: Option<f64>| v.map(|x| format!("{x:.1}")).unwrap_or(EMPTY_CELL.into());
        let fmt2 = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or(EMPTY_CELL.into());
        table.push(vec![
            row.group.clone(),
            row.n_variants.to_string(),
            row.n_trials.to_string(),
            fmt1(row.pass_at_k_pct),
            fmt1(row.checkpoint_accuracy_pct),
            fmt1(row.ask_rate_pct),
            fmt1(row.avg_questions_per_asking_trajectory),
            row.total_questions.to_string(),
            fmt2(row.gain_per_question_pass),
            fmt2(row.gain_per_question_ckpt),
        ]);
    }

    let widths: Vec<usize> = (0..table[0].len())
        .map(|col| table.iter().map(|r| r[col].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in table.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    out
}

/// One (group, metric, value) observation for plotting.
#[derive(Debug, Clone, Serialize)]
pub struct PlotPoint {
    pub group: String,
    pub metric: String,
    pub value: f64,
}

/// Flattens a report into plot-ready long-format points. Empty cells are
/// omitted rather than emitted as zeros.
pub fn to_plot_series(report: &BreakdownReport) -> Vec<PlotPoint> {
    let mut points = Vec::new();
    for row in &report.rows {
        let mut push = |metric: &str, value: Option<f64>| {
            if let Some(v) = value {
                points.push(PlotPoint {
                    group: row.group.clone(),
                    metric: metric.into(),
                    value: v,
                });
            }
        };
        push(&format!("pass_at_{}_pct", report.k), row.pass_at_k_pct);
        push("checkpoint_accuracy_pct", row.checkpoint_accuracy_pct);
        push("ask_rate_pct", row.ask_rate_pct);
        push(
            "avg_questions_per_asking_trajectory",
            row.avg_questions_per_asking_trajectory,
        );
        push("total_questions", Some(row.total_questions as f64));
        push("gain_per_question_pass", row.gain_per_question_pass);
        push("gain_per_question_ckpt", row.gain_per_question_ckpt);
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use underspec_core::{CheckpointOutcome, TerminalState, TrialStatus, UserCall};

    fn trial(success: bool, passed: &[bool], questions: usize) -> TrialRecord {
        TrialRecord {
            variant_id: "v".into(),
            trial_index: 0,
            terminal_state: TerminalState::new(
                passed.iter().map(|b| CheckpointOutcome::Pass(*b)).collect(),
            ),
            success,
            user_calls: (0..questions)
                .map(|i| UserCall {
                    question: format!("q{i}"),
                    context: String::new(),
                    response: "a".into(),
                    step_index: i as u64,
                })
                .collect(),
            final_response: String::new(),
            agent_config_id: "agent".into(),
            status: TrialStatus::Completed,
            total_steps: None,
        }
    }

    fn outcome(id: &str, dim: Dimension, trials: Vec<TrialRecord>) -> VariantOutcome {
        VariantOutcome {
            variant_id: id.into(),
            dataset: "ds".into(),
            agent_config_id: "agent".into(),
            dimension: Some(dim),
            ambiguity_class: Some(AmbiguityClass::OutcomeCritical),
            persona: None,
            trials,
        }
    }

    #[test]
    fn test_dimension_report_includes_empty_rows() {
        let outcomes = vec![outcome(
            "v1",
            Dimension::Goal,
            vec![
                trial(true, &[true, true], 1),
                trial(false, &[true, false], 0),
                trial(false, &[false, false], 2),
            ],
        )];
        let report = breakdown_report(&outcomes, None, GroupKey::Dimension, 3).unwrap();
        assert_eq!(report.rows.len(), 4);
        let goal = report.rows.iter().find(|r| r.group == "goal").unwrap();
        assert_eq!(goal.n_variants, 1);
        assert_eq!(goal.pass_at_k_pct, Some(100.0)); // c=1, n=3, k=3
        assert_eq!(goal.checkpoint_accuracy_pct, Some(50.0));
        assert_eq!(goal.ask_rate_pct, Some(66.7));
        assert_eq!(goal.avg_questions_per_asking_trajectory, Some(1.5));
        assert_eq!(goal.total_questions, 3);

        let context = report.rows.iter().find(|r| r.group == "context").unwrap();
        assert_eq!(context.n_variants, 0);
        assert_eq!(context.pass_at_k_pct, None);
        let rendered = render_table(&report);
        assert!(rendered.contains("--"));
    }

    #[test]
    fn test_gain_columns_need_baseline() {
        let with = vec![outcome(
            "v1",
            Dimension::Goal,
            vec![trial(true, &[true], 2), trial(true, &[true], 2)],
        )];
        let without = vec![outcome(
            "v1",
            Dimension::Goal,
            vec![trial(false, &[false], 0), trial(false, &[false], 0)],
        )];
        let no_base = breakdown_report(&with, None, GroupKey::Overall, 2).unwrap();
        assert_eq!(no_base.rows[0].gain_per_question_pass, None);

        let report = breakdown_report(&with, Some(&without), GroupKey::Overall, 2).unwrap();
        // pass 100% vs 0% over 4 questions = 25 points per question
        assert_eq!(report.rows[0].gain_per_question_pass, Some(25.0));
        assert_eq!(report.rows[0].gain_per_question_ckpt, Some(25.0));
    }

    #[test]
    fn test_plot_series_skips_empty_cells() {
        let outcomes = vec![outcome("v1", Dimension::Goal, vec![trial(true, &[true], 0)])];
        let report = breakdown_report(&outcomes, None, GroupKey::Dimension, 1).unwrap();
        let points = to_plot_series(&report);
        assert!(points.iter().any(|p| p.group == "goal"));
        assert!(!points
            .iter()
            .any(|p| p.group == "context" && p.metric != "total_questions"));
    }
}
