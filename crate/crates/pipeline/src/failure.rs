//! Failure-mode analysis of clarification trajectories.
//!
//! A judge model reviews one trial against its variant and answers 21
//! yes/no flags grouped into seven failure categories. Some flags only make
//! sense under preconditions (you cannot ask redundant questions having
//! asked once); where the precondition is mechanically checkable we compute
//! it here and force the verdict to N/A when unmet, instead of trusting the
//! judge. A flag whose precondition is provably met must NOT come back N/A;
//! that is treated as a malformed response and retried.

use crate::prompts::{FAILURE_JUDGE_FORMAT, FAILURE_JUDGE_PROMPT};
use crate::PipelineError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use underspec_core::{TrialRecord, UnderspecifiedVariant};
use underspec_gateway::{
    FieldKind, FieldSpec, Gateway, GatewayError, GenerationRequest, SchemaDescriptor,
};

// ---------------------------------------------------------------------------
// Flag registry

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureCategory {
    QuestionQuality,
    QuestionTargeting,
    InformationIntegration,
    OverClarification,
    UnderClarification,
    TimingStrategy,
    ResponseMisinterpretation,
}

impl FailureCategory {
    pub const ALL: [FailureCategory; 7] = [
        FailureCategory::QuestionQuality,
        FailureCategory::QuestionTargeting,
        FailureCategory::InformationIntegration,
        FailureCategory::OverClarification,
        FailureCategory::UnderClarification,
        FailureCategory::TimingStrategy,
        FailureCategory::ResponseMisinterpretation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FailureCategory::QuestionQuality => "question_quality",
            FailureCategory::QuestionTargeting => "question_targeting",
            FailureCategory::InformationIntegration => "information_integration",
            FailureCategory::OverClarification => "over_clarification",
            FailureCategory::UnderClarification => "under_clarification",
            FailureCategory::TimingStrategy => "timing_strategy",
            FailureCategory::ResponseMisinterpretation => "response_misinterpretation",
        }
    }
}

/// Precondition under which a flag is meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prerequisite {
    /// Always meaningful.
    None,
    /// At least this many questions were asked.
    AskedAtLeast(u64),
    /// At least this many questions were asked, plus a condition only the
    /// judge can evaluate.
    AskedAtLeastJudged(u64),
    /// Some removed segment is critical (criticality >= 0.5) and hard to
    /// guess (guessability <= 0.5).
    CriticalSegmentPresent,
    /// Removed segments span at least two dimensions.
    MultipleDimensions,
    /// Some removed segment is guessable (guessability >= 0.5).
    GuessableSegmentPresent,
    /// At least two removed segments are critical (criticality >= 0.5).
    MultipleCriticalSegments,
    /// Not mechanically checkable at all.
    Judged,
}

/// What we can prove about a prerequisite before asking the judge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechanicalStatus {
    Met,
    Unmet,
    Indeterminate,
}

pub struct FlagSpec {
    pub name: &'static str,
    pub category: FailureCategory,
    pub prerequisite: Prerequisite,
}

/// All 21 flags in canonical order. Parsed responses are normalized to this
/// order regardless of how the judge arranged them.
pub const FLAGS: [FlagSpec; 21] = [
    FlagSpec {
        name: "flag_vague_questions",
        category: FailureCategory::QuestionQuality,
        prerequisite: Prerequisite::AskedAtLeast(1),
    },
    FlagSpec {
        name: "flag_compound_questions",
        category: FailureCategory::QuestionQuality,
        prerequisite: Prerequisite::AskedAtLeast(1),
    },
    FlagSpec {
        name: "flag_closed_questions",
        category: FailureCategory::QuestionQuality,
        prerequisite: Prerequisite::Judged,
    },
    FlagSpec {
        name: "flag_missed_critical_segments",
        category: FailureCategory::QuestionTargeting,
        prerequisite: Prerequisite::CriticalSegmentPresent,
    },
    FlagSpec {
        name: "flag_wrong_dimension_focus",
        category: FailureCategory::QuestionTargeting,
        prerequisite: Prerequisite::MultipleDimensions,
    },
    FlagSpec {
        name: "flag_inferable_information_asked",
        category: FailureCategory::QuestionTargeting,
        prerequisite: Prerequisite::GuessableSegmentPresent,
    },
    FlagSpec {
        name: "flag_ignoring_user_response",
        category: FailureCategory::InformationIntegration,
        prerequisite: Prerequisite::AskedAtLeastJudged(1),
    },
    FlagSpec {
        name: "flag_incorrect_information_application",
        category: FailureCategory::InformationIntegration,
        prerequisite: Prerequisite::Judged,
    },
    FlagSpec {
        name: "flag_partial_information_utilization",
        category: FailureCategory::InformationIntegration,
        prerequisite: Prerequisite::Judged,
    },
    FlagSpec {
        name: "flag_redundant_questions",
        category: FailureCategory::OverClarification,
        prerequisite: Prerequisite::AskedAtLeast(2),
    },
    FlagSpec {
        name: "flag_unnecessary_questions",
        category: FailureCategory::OverClarification,
        prerequisite: Prerequisite::None,
    },
    FlagSpec {
        name: "flag_excessive_cost",
        category: FailureCategory::OverClarification,
        prerequisite: Prerequisite::AskedAtLeast(3),
    },
    FlagSpec {
        name: "flag_premature_execution",
        category: FailureCategory::UnderClarification,
        prerequisite: Prerequisite::MultipleCriticalSegments,
    },
    FlagSpec {
        name: "flag_insufficient_question_depth",
        category: FailureCategory::UnderClarification,
        prerequisite: Prerequisite::MultipleCriticalSegments,
    },
    FlagSpec {
        name: "flag_false_confidence",
        category: FailureCategory::UnderClarification,
        prerequisite: Prerequisite::Judged,
    },
    FlagSpec {
        name: "flag_late_clarification",
        category: FailureCategory::TimingStrategy,
        prerequisite: Prerequisite::AskedAtLeastJudged(1),
    },
    FlagSpec {
        name: "flag_upfront_question_dump",
        category: FailureCategory::TimingStrategy,
        prerequisite: Prerequisite::AskedAtLeast(3),
    },
    FlagSpec {
        name: "flag_inefficient_question_sequence",
        category: FailureCategory::TimingStrategy,
        prerequisite: Prerequisite::AskedAtLeast(2),
    },
    FlagSpec {
        name: "flag_literal_misunderstanding",
        category: FailureCategory::ResponseMisinterpretation,
        prerequisite: Prerequisite::Judged,
    },
    FlagSpec {
        name: "flag_context_misapplication",
        category: FailureCategory::ResponseMisinterpretation,
        prerequisite: Prerequisite::Judged,
    },
    FlagSpec {
        name: "flag_implicit_information_missed",
        category: FailureCategory::ResponseMisinterpretation,
        prerequisite: Prerequisite::Judged,
    },
];

fn flag_spec(name: &str) -> Option<&'static FlagSpec> {
    FLAGS.iter().find(|f| f.name == name)
}

/// Evaluates the mechanically checkable part of a flag's prerequisite.
pub fn mechanical_status(
    prerequisite: Prerequisite,
    trial: &TrialRecord,
    variant: &UnderspecifiedVariant,
) -> MechanicalStatus {
    let questions = trial.question_count() as u64;
    let segments = &variant.removed_segments;
    let met = |ok: bool| if ok { MechanicalStatus::Met } else { MechanicalStatus::Unmet };
    match prerequisite {
        Prerequisite::None => MechanicalStatus::Met,
        Prerequisite::AskedAtLeast(n) => met(questions >= n),
        Prerequisite::AskedAtLeastJudged(n) => {
            if questions >= n {
                MechanicalStatus::Indeterminate
            } else {
                MechanicalStatus::Unmet
            }
        }
        Prerequisite::CriticalSegmentPresent => met(segments
            .iter()
            .any(|s| s.criticality.value() >= 0.5 && s.guessability.value() <= 0.5)),
        Prerequisite::MultipleDimensions => {
            let mut dims: Vec<_> = segments.iter().map(|s| s.dimension).collect();
            dims.sort_unstable();
            dims.dedup();
            met(dims.len() >= 2)
        }
        Prerequisite::GuessableSegmentPresent => {
            met(segments.iter().any(|s| s.guessability.value() >= 0.5))
        }
        Prerequisite::MultipleCriticalSegments => {
            met(segments.iter().filter(|s| s.criticality.value() >= 0.5).count() >= 2)
        }
        Prerequisite::Judged => MechanicalStatus::Indeterminate,
    }
}

// ---------------------------------------------------------------------------
// Verdicts

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
    #[serde(rename = "N/A")]
    NotApplicable,
}

impl Verdict {
    fn parse(s: &str) -> Option<Verdict> {
        match s {
            "YES" => Some(Verdict::Yes),
            "NO" => Some(Verdict::No),
            "N/A" => Some(Verdict::NotApplicable),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagVerdict {
    pub flag_name: String,
    pub verdict: Verdict,
    pub rationale: String,
}

// ---------------------------------------------------------------------------
// Computed trajectory quantities

/// Quantities injected into the judge context so it reasons from numbers we
/// computed rather than ones it estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryQuantities {
    pub question_count: u64,
    /// Checkpoint credit earned per question asked; None when no questions
    /// were asked.
    pub cost_efficiency: Option<f64>,
    /// Fraction of removed segments whose value shows up (case-insensitive)
    /// in some question or user answer.
    pub ask_recall: f64,
    /// Fraction of removed values recovered verbatim in user answers.
    pub information_recovery_rate: f64,
    /// Whether every question fell in the first 10% of the trajectory; None
    /// when the step budget is unknown.
    pub all_questions_in_first_tenth: Option<bool>,
}

pub fn compute_quantities(
    trial: &TrialRecord,
    variant: &UnderspecifiedVariant,
) -> TrajectoryQuantities {
    let question_count = trial.question_count() as u64;
    let credit = {
        let outcomes = trial.terminal_state.outcomes();
        if outcomes.is_empty() {
            0.0
        } else {
            outcomes.iter().map(|o| o.credit()).sum::<f64>() / outcomes.len() as f64
        }
    };
    let cost_efficiency = (question_count > 0).then(|| credit / question_count as f64);

    let asked_text: String = trial
        .user_calls
        .iter()
        .flat_map(|c| [c.question.as_str(), c.context.as_str(), c.response.as_str()])
        .collect::<Vec<_>>()
        .join("\n")
        .to_lowercase();
    let responses: String = trial
        .user_calls
        .iter()
        .map(|c| c.response.as_str())
        .collect::<Vec<_>>()
        .join("\n");

    let total = variant.removed_segments.len();
    let (mut touched, mut recovered) = (0usize, 0usize);
    for segment in &variant.removed_segments {
        if asked_text.contains(&segment.value.to_lowercase()) {
            touched += 1;
        }
        if responses.contains(&segment.value) {
            recovered += 1;
        }
    }
    let frac = |k: usize| if total == 0 { 0.0 } else { k as f64 / total as f64 };

    let all_questions_in_first_tenth = trial.total_steps.filter(|&t| t > 0).map(|t| {
        trial
            .user_calls
            .iter()
            .all(|c| c.step_index as f64 / t as f64 <= 0.10)
    });

    TrajectoryQuantities {
        question_count,
        cost_efficiency,
        ask_recall: frac(touched),
        information_recovery_rate: frac(recovered),
        all_questions_in_first_tenth,
    }
}

// ---------------------------------------------------------------------------
// Judge invocation

#[derive(Debug, Clone)]
pub struct FailureJudgeConfig {
    pub model_id: String,
    pub max_output_tokens: Option<u32>,
}

impl FailureJudgeConfig {
    pub fn new(model_id: impl Into<String>) -> Self {
        FailureJudgeConfig {
            model_id: model_id.into(),
            max_output_tokens: None,
        }
    }
}

fn flags_schema() -> SchemaDescriptor {
    SchemaDescriptor::new(
        "failure_flags",
        vec![FieldSpec::new("flags", FieldKind::Array)],
    )
}

/// Builds the judge request for one trial. Exposed so fixture suites can
/// record/replay the exact call the analysis makes.
pub fn failure_judge_request(
    trial: &TrialRecord,
    variant: &UnderspecifiedVariant,
    config: &FailureJudgeConfig,
) -> GenerationRequest {
    let quantities = compute_quantities(trial, variant);
    let mut user = String::new();

    let _ = writeln!(user, "## Underspecified Task Prompt");
    let _ = writeln!(user, "{}\n", variant.underspecified_prompt);

    let _ = writeln!(user, "## Removed Segments");
    for s in &variant.removed_segments {
        let _ = writeln!(
            user,
            "- {} ({}/{}): value \"{}\", criticality {:.1}, guessability {:.1}",
            s.id,
            s.dimension.as_str(),
            s.subdimension.as_str(),
            s.value,
            s.criticality.value(),
            s.guessability.value(),
        );
    }
    user.push('\n');

    let _ = writeln!(user, "## Expected Questions");
    for eq in &variant.expected_questions {
        let _ = writeln!(user, "- {}: {}", eq.segment_id, eq.questions.join(" | "));
    }
    user.push('\n');

    let _ = writeln!(user, "## Trajectory");
    for call in &trial.user_calls {
        let step = match trial.total_steps {
            Some(total) => format!("[step {}/{}]", call.step_index, total),
            None => format!("[step {}]", call.step_index),
        };
        let _ = writeln!(user, "{step} Q: {}", call.question);
        if !call.context.is_empty() {
            let _ = writeln!(user, "  Context: {}", call.context);
        }
        let _ = writeln!(user, "  A: {}", call.response);
    }
    user.push('\n');

    let _ = writeln!(user, "## Final Response");
    let _ = writeln!(user, "{}\n", trial.final_response);

    let _ = writeln!(user, "## Outcome");
    let _ = writeln!(user, "- success: {}", trial.success);
    let _ = writeln!(
        user,
        "- terminal_state: {}",
        underspec_core::canonical_terminal_key(&trial.terminal_state)
    );
    user.push('\n');

    let _ = writeln!(user, "## Computed Quantities");
    let _ = writeln!(user, "- question_count: {}", quantities.question_count);
    match quantities.cost_efficiency {
        Some(v) => {
            let _ = writeln!(user, "- cost_efficiency: {v:.3}");
        }
        None => {
            let _ = writeln!(user, "- cost_efficiency: n/a (no questions asked)");
        }
    }
    let _ = writeln!(user, "- ask_recall: {:.3}", quantities.ask_recall);
    let _ = writeln!(
        user,
        "- information_recovery_rate: {:.3}",
        quantities.information_recovery_rate
    );
    let first_tenth = match quantities.all_questions_in_first_tenth {
        Some(true) => "true",
        Some(false) => "false",
        None => "unknown (step budget not reported)",
    };
    let _ = writeln!(user, "- all_questions_in_first_10pct: {first_tenth}");
    user.push('\n');

    let _ = writeln!(user, "## Prerequisite Status (computed)");
    for flag in &FLAGS {
        let line = match mechanical_status(flag.prerequisite, trial, variant) {
            MechanicalStatus::Met => "met; N/A is not a valid answer",
            MechanicalStatus::Unmet => "NOT met; answer N/A",
            MechanicalStatus::Indeterminate => "evaluate the prerequisite yourself",
        };
        let _ = writeln!(user, "- {}: {line}", flag.name);
    }

    let system = format!("{FAILURE_JUDGE_PROMPT}\n\n{FAILURE_JUDGE_FORMAT}");
    GenerationRequest {
        max_output_tokens: config.max_output_tokens,
        ..GenerationRequest::new(&config.model_id, system, user)
    }
    .with_schema("failure_flags")
}

#[derive(Deserialize)]
struct RawFlagsDoc {
    flags: Vec<RawFlag>,
}

#[derive(Deserialize)]
struct RawFlag {
    flag_name: String,
    verdict: String,
    rationale: String,
}

/// Judges one trajectory. Requires at least one question: trials that never
/// asked are out of scope for question-quality analysis.
pub fn judge_trajectory(
    gateway: &Gateway,
    trial: &TrialRecord,
    variant: &UnderspecifiedVariant,
    config: &FailureJudgeConfig,
) -> Result<Vec<FlagVerdict>, PipelineError> {
    if trial.user_calls.is_empty() {
        return Err(PipelineError::ContractViolation(format!(
            "trial {}#{} asked no questions; nothing to judge",
            trial.variant_id, trial.trial_index
        )));
    }
    if trial.variant_id != variant.variant_id {
        return Err(PipelineError::ContractViolation(format!(
            "trial belongs to {}, not {}",
            trial.variant_id, variant.variant_id
        )));
    }

    let request = failure_judge_request(trial, variant, config);
    let statuses: Vec<(usize, MechanicalStatus)> = FLAGS
        .iter()
        .enumerate()
        .map(|(i, f)| (i, mechanical_status(f.prerequisite, trial, variant)))
        .collect();

    let verdicts = gateway
        .complete_validated(&request, &flags_schema(), |value| {
            let doc: RawFlagsDoc = serde_json::from_value(value.clone())
                .map_err(|e| format!("flags document malformed: {e}"))?;
            if doc.flags.len() != FLAGS.len() {
                return Err(format!(
                    "expected {} flags, got {}",
                    FLAGS.len(),
                    doc.flags.len()
                ));
            }

            // normalize to registry order, requiring each flag exactly once
            let mut slots: Vec<Option<FlagVerdict>> = vec![None; FLAGS.len()];
            for raw in doc.flags {
                let Some(index) = FLAGS.iter().position(|f| f.name == raw.flag_name) else {
                    return Err(format!("unknown flag {}", raw.flag_name));
                };
                if slots[index].is_some() {
                    return Err(format!("flag {} reported twice", raw.flag_name));
                }
                let verdict = Verdict::parse(&raw.verdict)
                    .ok_or_else(|| format!("bad verdict {:?} for {}", raw.verdict, raw.flag_name))?;
                slots[index] = Some(FlagVerdict {
                    flag_name: raw.flag_name,
                    verdict,
                    rationale: raw.rationale,
                });
            }

            let mut verdicts = Vec::with_capacity(FLAGS.len());
            for (index, status) in &statuses {
                let mut fv = slots[*index].take().expect("all slots filled");
                match status {
                    // the judge has no say when we can prove the flag moot
                    MechanicalStatus::Unmet => {
                        if fv.verdict != Verdict::NotApplicable {
                            log::warn!(
                                "{}: judge said {:?} but prerequisite is unmet; forcing N/A",
                                fv.flag_name,
                                fv.verdict
                            );
                            fv.rationale = "prerequisite not met (enforced)".to_string();
                        }
                        fv.verdict = Verdict::NotApplicable;
                    }
                    MechanicalStatus::Met => {
                        if fv.verdict == Verdict::NotApplicable {
                            return Err(format!(
                                "{} answered N/A but its prerequisite is met",
                                fv.flag_name
                            ));
                        }
                    }
                    MechanicalStatus::Indeterminate => {}
                }
                verdicts.push(fv);
            }
            Ok(verdicts)
        })
        .map_err(|e| match e {
            GatewayError::StructuredOutput { .. } => PipelineError::JudgeFailure(format!(
                "failure judge gave no usable verdict for {}#{}: {e}",
                trial.variant_id, trial.trial_index
            )),
            other => PipelineError::Gateway(other),
        })?;
    Ok(verdicts)
}

// ---------------------------------------------------------------------------
// Aggregation

/// Any-YES rollup of the 21 flags into the seven categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CategoryProfile {
    pub question_quality: bool,
    pub question_targeting: bool,
    pub information_integration: bool,
    pub over_clarification: bool,
    pub under_clarification: bool,
    pub timing_strategy: bool,
    pub response_misinterpretation: bool,
}

impl CategoryProfile {
    pub fn get(&self, category: FailureCategory) -> bool {
        match category {
            FailureCategory::QuestionQuality => self.question_quality,
            FailureCategory::QuestionTargeting => self.question_targeting,
            FailureCategory::InformationIntegration => self.information_integration,
            FailureCategory::OverClarification => self.over_clarification,
            FailureCategory::UnderClarification => self.under_clarification,
            FailureCategory::TimingStrategy => self.timing_strategy,
            FailureCategory::ResponseMisinterpretation => self.response_misinterpretation,
        }
    }

    fn set(&mut self, category: FailureCategory) {
        match category {
            FailureCategory::QuestionQuality => self.question_quality = true,
            FailureCategory::QuestionTargeting => self.question_targeting = true,
            FailureCategory::InformationIntegration => self.information_integration = true,
            FailureCategory::OverClarification => self.over_clarification = true,
            FailureCategory::UnderClarification => self.under_clarification = true,
            FailureCategory::TimingStrategy => self.timing_strategy = true,
            FailureCategory::ResponseMisinterpretation => self.response_misinterpretation = true,
        }
    }

    pub fn any(&self) -> bool {
        FailureCategory::ALL.iter().any(|c| self.get(*c))
    }
}

pub fn aggregate_categories(verdicts: &[FlagVerdict]) -> CategoryProfile {
    let mut profile = CategoryProfile::default();
    for v in verdicts {
        if v.verdict == Verdict::Yes {
            if let Some(spec) = flag_spec(&v.flag_name) {
                profile.set(spec.category);
            }
        }
    }
    profile
}

/// One judged trial, ready for rate tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureProfile {
    pub variant_id: String,
    pub trial_index: u64,
    pub dataset: String,
    pub agent_config_id: String,
    pub success: bool,
    pub categories: CategoryProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureGroupKey {
    Overall,
    Dataset,
    AgentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRates {
    pub question_quality: f64,
    pub question_targeting: f64,
    pub information_integration: f64,
    pub over_clarification: f64,
    pub under_clarification: f64,
    pub timing_strategy: f64,
    pub response_misinterpretation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRateRow {
    pub group: String,
    pub n: usize,
    pub rates: CategoryRates,
}

/// Per-group fraction of judged trials exhibiting each category, rounded to
/// two decimals. `failed_only` restricts to unsuccessful trials, the usual
/// view when asking why agents fail.
pub fn failure_rate_table(
    profiles: &[FailureProfile],
    group_key: FailureGroupKey,
    failed_only: bool,
) -> Vec<FailureRateRow> {
    let mut groups: BTreeMap<String, Vec<&FailureProfile>> = BTreeMap::new();
    for p in profiles {
        if failed_only && p.success {
            continue;
        }
        let key = match group_key {
            FailureGroupKey::Overall => "overall".to_string(),
            FailureGroupKey::Dataset => p.dataset.clone(),
            FailureGroupKey::AgentConfig => p.agent_config_id.clone(),
        };
        groups.entry(key).or_default().push(p);
    }

    let round2 = |x: f64| (x * 100.0).round() / 100.0;
    groups
        .into_iter()
        .map(|(group, members)| {
            let n = members.len();
            let rate = |cat: FailureCategory| {
                let hits = members.iter().filter(|p| p.categories.get(cat)).count();
                round2(hits as f64 / n as f64)
            };
            FailureRateRow {
                group,
                n,
                rates: CategoryRates {
                    question_quality: rate(FailureCategory::QuestionQuality),
                    question_targeting: rate(FailureCategory::QuestionTargeting),
                    information_integration: rate(FailureCategory::InformationIntegration),
                    over_clarification: rate(FailureCategory::OverClarification),
                    under_clarification: rate(FailureCategory::UnderClarification),
                    timing_strategy: rate(FailureCategory::TimingStrategy),
                    response_misinterpretation: rate(FailureCategory::ResponseMisinterpretation),
                },
            }
        })
        .collect()
}

/// Plain-text rendering of a failure-rate table.
pub fn render_failure_table(rows: &[FailureRateRow]) -> String {
    let headers = [
        "group", "n", "q_qual", "q_targ", "info_int", "over_c", "under_c", "timing", "misint",
    ];
    let mut cells: Vec<Vec<String>> = vec![headers.iter().map(|h| h.to_string()).collect()];
    for row in rows {
        let r = &row.rates;
        cells.push(vec![
            row.group.clone(),
            row.n.to_string(),
            format!("{:.2}", r.question_quality),
            format!("{:.2}", r.question_targeting),
            format!("{:.2}", r.information_integration),
            format!("{:.2}", r.over_clarification),
            format!("{:.2}", r.under_clarification),
            format!("{:.2}", r.timing_strategy),
            format!("{:.2}", r.response_misinterpretation),
        ]);
    }
    let widths: Vec<usize> = (0..headers.len())
        .map(|i| cells.iter().map(|row| row[i].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &cells {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
