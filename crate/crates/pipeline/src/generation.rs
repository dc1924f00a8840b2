//! Phase 2: variant generation.
//!
//! Candidate subsets of ranked segments are removed from the task prompt by
//! the generation model under one of three removal strategies. The model's
//! output is never trusted: every variant is post-validated locally (no
//! leaked values, full question coverage, untouched lines preserved
//! byte-for-byte) and validation failures are echoed back through the
//! gateway's retry loop as regeneration requests.

use crate::prompts::{fill, severity_instruction, GENERATION_PROMPT};
use crate::PipelineError;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use underspec_core::{
    Dimension, ExpectedQuestions, Grounding, Level3Score, RemovalStrategy, Segment, Subdimension,
    TaskRecord, UnderspecifiedVariant,
};
use underspec_gateway::{
    FieldKind, FieldSpec, Gateway, GatewayError, GenerationRequest, SchemaDescriptor,
};

/// Model settings for generation. Temperature stays at 0.0.
#[derive(Debug, Clone)]
pub struct GenerationConfig {
    pub model_id: String,
    pub max_output_tokens: Option<u32>,
}

impl GenerationConfig {
    pub fn new(model_id: impl Into<String>) -> Self {
        GenerationConfig {
            model_id: model_id.into(),
            max_output_tokens: None,
        }
    }
}

/// All segment subsets eligible for removal: every subset of size
/// `1..=max_segments` whose members all have priority at or above
/// `min_priority`. Order is deterministic: smaller subsets first, then
/// lexicographic by position in the input (which callers pass ranked).
pub fn enumerate_candidates(
    segments: &[Segment],
    max_segments: usize,
    min_priority: f64,
) -> Vec<Vec<Segment>> {
    let eligible: Vec<&Segment> = segments
        .iter()
        .filter(|s| s.priority() >= min_priority)
        .collect();
    let mut subsets = Vec::new();
    for size in 1..=max_segments.min(eligible.len()) {
        let mut indices: Vec<usize> = (0..size).collect();
        loop {
            subsets.push(indices.iter().map(|&i| eligible[i].clone()).collect());
            if !next_combination(&mut indices, eligible.len()) {
                break;
            }
        }
    }
    subsets
}

/// Advances `indices` to the next k-combination of `0..n` in lexicographic
/// order; false when exhausted.
fn next_combination(indices: &mut [usize], n: usize) -> bool {
    let k = indices.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if indices[i] < n - k + i {
            indices[i] += 1;
            for j in i + 1..k {
                indices[j] = indices[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// True iff the segment's value no longer occurs in the variant prompt.
/// Case-sensitive: the leak check is on the atomic value exactly as it
/// appeared, not on paraphrases of the wider text span.
pub fn verify_removal(variant_prompt: &str, segment: &Segment) -> bool {
    !variant_prompt.contains(&segment.value)
}

/// Checks that every original line containing none of the removed values
/// appears byte-identical in the variant, in the original order. This is the
/// "Preserve exact formatting" contract at line granularity.
pub fn check_line_preservation(
    original: &str,
    variant: &str,
    removed_values: &[&str],
) -> Result<(), String> {
    let mut variant_lines = variant.lines();
    for line in original.lines() {
        if removed_values.iter().any(|v| line.contains(v)) {
            continue; // this line was legitimately edited
        }
        if !variant_lines.any(|vl| vl == line) {
            return Err(format!(
                "line not touched by any removed segment was altered or moved: {line:?}"
            ));
        }
    }
    Ok(())
}

/// Deterministic variant id: parent task, removed segment ids, strategy.
pub fn variant_id_for(task_id: &str, subset: &[Segment], strategy: RemovalStrategy) -> String {
    let ids: Vec<&str> = subset.iter().map(|s| s.id.as_str()).collect();
    format!("{task_id}_V_{}_{strategy}", ids.join("_"))
}

/// The exact gateway request generation will send for this (task, subset,
/// strategy). Exposed so fixture tooling can address the same digest.
pub fn generation_request(
    task: &TaskRecord,
    subset: &[Segment],
    strategy: RemovalStrategy,
    config: &GenerationConfig,
) -> GenerationRequest {
    GenerationRequest {
        max_output_tokens: config.max_output_tokens,
        ..GenerationRequest::new(
            &config.model_id,
            system_prompt(subset, strategy),
            user_prompt(task, subset),
        )
    }
    .with_schema("variant_generation")
}

/// Runs one generation exchange and returns the validated variant.
pub fn generate_variant(
    task: &TaskRecord,
    subset: &[Segment],
    strategy: RemovalStrategy,
    gateway: &Gateway,
    config: &GenerationConfig,
) -> Result<UnderspecifiedVariant, PipelineError> {
    if subset.is_empty() {
        return Err(PipelineError::ContractViolation(
            "generate_variant needs a non-empty segment subset".into(),
        ));
    }
    for seg in subset {
        if !task.prompt.contains(&seg.value) {
            return Err(PipelineError::ContractViolation(format!(
                "segment {} value {:?} does not occur in task {}",
                seg.id, seg.value, task.task_id
            )));
        }
    }

    let vid = variant_id_for(&task.task_id, subset, strategy);
    let request = generation_request(task, subset, strategy, config);
    let schema = SchemaDescriptor::new(
        "variant_generation",
        vec![
            FieldSpec::new("underspecified_prompt", FieldKind::String),
            FieldSpec::new("expected_questions", FieldKind::Array),
            FieldSpec::new("failure_mode", FieldKind::String),
        ],
    );

    let draft: GenerationDraft = gateway
        .complete_validated(&request, &schema, |value| {
            let draft: GenerationDraft = serde_json::from_value(value.clone())
                .map_err(|e| format!("response shape is invalid: {e}"))?;
            validate_generation(&task.prompt, subset, &draft)?;
            Ok(draft)
        })
        .map_err(|err| match err {
            GatewayError::StructuredOutput { ref attempts } => {
                let last = attempts.last();
                PipelineError::GenerationFailed {
                    variant_id: vid.clone(),
                    reason: last.map(|a| a.error.clone()).unwrap_or_default(),
                    offending_prompt: last
                        .map(|a| offending_prompt(&a.response))
                        .unwrap_or_default(),
                }
            }
            other => PipelineError::Gateway(other),
        })?;

    let variant = UnderspecifiedVariant {
        variant_id: vid,
        parent_task_id: task.task_id.clone(),
        underspecified_prompt: draft.underspecified_prompt,
        removed_segments: subset.to_vec(),
        strategy,
        expected_questions: draft.expected_questions,
        expected_failure_mode: draft.failure_mode,
    };
    variant.validate()?;
    Ok(variant)
}

#[derive(Debug, Deserialize)]
struct GenerationDraft {
    underspecified_prompt: String,
    expected_questions: Vec<ExpectedQuestions>,
    failure_mode: String,
}

/// Post-validation of a generation draft. Any failure here regenerates with
/// the reason echoed to the model.
fn validate_generation(
    original: &str,
    subset: &[Segment],
    draft: &GenerationDraft,
) -> Result<(), String> {
    for seg in subset {
        if !verify_removal(&draft.underspecified_prompt, seg) {
            return Err(format!(
                "removed value {:?} (segment {}) still occurs in underspecified_prompt; \
                 remove ALL occurrences",
                seg.value, seg.id
            ));
        }
    }

    let known: BTreeSet<&str> = subset.iter().map(|s| s.id.as_str()).collect();
    let mut covered = BTreeSet::new();
    for eq in &draft.expected_questions {
        if !known.contains(eq.segment_id.as_str()) {
            return Err(format!(
                "expected_questions references unknown segment_id {:?}",
                eq.segment_id
            ));
        }
        if eq.questions.iter().any(|q| q.trim().is_empty()) {
            return Err(format!(
                "expected_questions for {} contains an empty question",
                eq.segment_id
            ));
        }
        if !eq.questions.is_empty() {
            covered.insert(eq.segment_id.as_str());
        }
    }
    for id in &known {
        if !covered.contains(id) {
            return Err(format!(
                "segment {id} has no expected question; every removed segment needs at least one"
            ));
        }
    }

    if draft.failure_mode.trim().is_empty() {
        return Err("failure_mode must not be empty".to_string());
    }

    let values: Vec<&str> = subset.iter().map(|s| s.value.as_str()).collect();
    check_line_preservation(original, &draft.underspecified_prompt, &values)
        .map_err(|e| format!("{e}; keep lines you did not edit byte-identical"))?;

    Ok(())
}

/// Best-effort recovery of the failed prompt text from a raw model response
/// for error reporting.
fn offending_prompt(response: &str) -> String {
    serde_json::from_str::<serde_json::Value>(response)
        .ok()
        .and_then(|v| v["underspecified_prompt"].as_str().map(str::to_string))
        .unwrap_or_else(|| response.to_string())
}

// The single-segment block exactly as it appears in the template; for
// multi-segment subsets this region is replaced with one stanza per segment.
const SEGMENT_BLOCK: &str = "- Dimension: {dimension}\n- Value: \"{value}\"\n- Text: \"{text}\"";

fn system_prompt(subset: &[Segment], strategy: RemovalStrategy) -> String {
    let base = fill(
        GENERATION_PROMPT,
        &[("severity_instruction", severity_instruction(strategy))],
    );
    if subset.len() == 1 {
        let seg = &subset[0];
        return fill(
            &base,
            &[
                ("dimension", seg.dimension.as_str()),
                ("value", &seg.value),
                ("text", &seg.text),
            ],
        );
    }
    let stanzas: Vec<String> = subset
        .iter()
        .map(|seg| {
            format!(
                "### {}\n{}",
                seg.id,
                fill(
                    SEGMENT_BLOCK,
                    &[
                        ("dimension", seg.dimension.as_str()),
                        ("value", &seg.value),
                        ("text", &seg.text),
                    ],
                )
            )
        })
        .collect();
    base.replace(SEGMENT_BLOCK, &stanzas.join("\n"))
}

fn user_prompt(task: &TaskRecord, subset: &[Segment]) -> String {
    let mut out = format!("## Original Task Prompt\n{}\n\n## Segment IDs\n", task.prompt);
    for seg in subset {
        out.push_str(&format!("- {}: \"{}\"\n", seg.id, seg.value));
    }
    out
}

// ---------------------------------------------------------------------------
// Phase-2 document schema

/// On-disk shape of a generated variant, with full segment metadata for
/// filtering and analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase2Document {
    /// The variant id (this document describes a variant, not a base task).
    pub task_id: String,
    pub parent_task_id: String,
    pub agent_prompt: String,
    pub removed_segments: Vec<Phase2Segment>,
    pub criteria: Criteria,
    /// One single-key map per segment: {"S1": ["question", ...]}.
    pub expected_questions: Vec<BTreeMap<String, Vec<String>>>,
    pub expected_failure_mode: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criteria {
    pub severity: RemovalStrategy,
}

/// Segment as stored in Phase-2 documents: everything the pipeline knows,
/// including the derived priority score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase2Segment {
    pub id: String,
    pub dimension: Dimension,
    pub subdimension: Subdimension,
    pub value: String,
    pub text: String,
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub grounding: Option<Grounding>,
    pub criticality: Level3Score,
    pub guessability: Level3Score,
    pub priority_score: f64,
}

impl Phase2Document {
    pub fn from_variant(variant: &UnderspecifiedVariant) -> Self {
        Phase2Document {
            task_id: variant.variant_id.clone(),
            parent_task_id: variant.parent_task_id.clone(),
            agent_prompt: variant.underspecified_prompt.clone(),
            removed_segments: variant
                .removed_segments
                .iter()
                .map(|s| Phase2Segment {
                    id: s.id.clone(),
                    dimension: s.dimension,
                    subdimension: s.subdimension,
                    value: s.value.clone(),
                    text: s.text.clone(),
                    grounding: s.grounding.clone(),
                    criticality: s.criticality,
                    guessability: s.guessability,
                    priority_score: s.priority(),
                })
                .collect(),
            criteria: Criteria {
                severity: variant.strategy,
            },
            expected_questions: variant
                .expected_questions
                .iter()
                .map(|eq| BTreeMap::from([(eq.segment_id.clone(), eq.questions.clone())]))
                .collect(),
            expected_failure_mode: variant.expected_failure_mode.clone(),
        }
    }

    pub fn to_variant(&self) -> Result<UnderspecifiedVariant, PipelineError> {
        let mut expected_questions = Vec::new();
        for entry in &self.expected_questions {
            if entry.len() != 1 {
                return Err(PipelineError::ContractViolation(format!(
                    "expected_questions entries must have exactly one segment key, got {}",
                    entry.len()
                )));
            }
            let (segment_id, questions) = entry.iter().next().unwrap();
            expected_questions.push(ExpectedQuestions {
                segment_id: segment_id.clone(),
                questions: questions.clone(),
            });
        }

        let mut removed_segments = Vec::new();
        for p2 in &self.removed_segments {
            let segment = Segment {
                id: p2.id.clone(),
                text: p2.text.clone(),
                value: p2.value.clone(),
                dimension: p2.dimension,
                subdimension: p2.subdimension,
                criticality: p2.criticality,
                guessability: p2.guessability,
                grounding: p2.grounding.clone(),
            };
            if segment.priority() != p2.priority_score {
                return Err(PipelineError::ContractViolation(format!(
                    "segment {}: stored priority_score {} disagrees with criticality*(1-guessability) = {}",
                    p2.id, p2.priority_score, segment.priority()
                )));
            }
            removed_segments.push(segment);
        }

        let variant = UnderspecifiedVariant {
            variant_id: self.task_id.clone(),
            parent_task_id: self.parent_task_id.clone(),
            underspecified_prompt: self.agent_prompt.clone(),
            removed_segments,
            strategy: self.criteria.severity,
            expected_questions,
            expected_failure_mode: self.expected_failure_mode.clone(),
        };
        variant.validate()?;
        Ok(variant)
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;
    use underspec_core::SuccessRule;
    use underspec_gateway::ScriptedProvider;

    const EXCEL_ORIGINAL: &str = "Find the respondent_counts.xlsx file under Documents/Data Analysis on Owncloud, and based on the source \"unformatted\" sheet, create a \"formatted\" sheet and make formatting edits based on the following requirements:\n1. Change the background color of top-header cells to skyblue (#87CEEB)\n2. Make sure all cell values are horizontally centered in their cells\nDo not change the \"unformatted\" sheet, only make changes in the \"formatted\" sheet. Save all your changes to respondent_counts.xlsx on owncloud.";

    const EXCEL_DELETE: &str = "Find the respondent_counts.xlsx file under Documents/Data Analysis on Owncloud, and based on the source \"unformatted\" sheet, create a \"formatted\" sheet and make formatting edits based on the following requirements:\n1. Change the background color of top-header cells\n2. Make sure all cell values are in their cells\nDo not change the \"unformatted\" sheet, only make changes in the \"formatted\" sheet. Save all your changes to respondent_counts.xlsx on owncloud.";

    fn seg(id: &str, value: &str, text: &str, c: f64, g: f64) -> Segment {
        Segment {
            id: id.to_string(),
            text: text.to_string(),
            value: value.to_string(),
            dimension: Dimension::Constraint,
            subdimension: Subdimension::Precision,
            criticality: Level3Score::from_f64(c).unwrap(),
            guessability: Level3Score::from_f64(g).unwrap(),
            grounding: None,
        }
    }

    fn excel_segments() -> Vec<Segment> {
        vec![
            seg(
                "S1",
                "#87CEEB",
                "background color of top-header cells to skyblue (#87CEEB)",
                1.0,
                0.0,
            ),
            seg(
                "S2",
                "horizontally centered",
                "all cell values are horizontally centered in their cells",
                1.0,
                0.0,
            ),
        ]
    }

    fn excel_task() -> TaskRecord {
        TaskRecord {
            task_id: "tac_excel_fmt".to_string(),
            dataset_id: "fixture".to_string(),
            prompt: EXCEL_ORIGINAL.to_string(),
            checkpoint_spec: Vec::new(),
            success_rule: SuccessRule::AllPass,
            outcome_domain: Default::default(),
            grounding_data: None,
        }
    }

    fn good_response() -> String {
        json!({
            "underspecified_prompt": EXCEL_DELETE,
            "expected_questions": [
                {"segment_id": "S1", "questions": ["What background color should the top-header cells use?"]},
                {"segment_id": "S2", "questions": ["How should cell values be aligned?"]}
            ],
            "failure_mode": "Agent picks an arbitrary color and alignment, failing both formatting checks."
        })
        .to_string()
    }

    fn gw(responses: Vec<String>) -> Gateway {
        Gateway::new(Box::new(ScriptedProvider::new(responses)))
    }

    #[test]
    fn test_enumerate_sizes_then_lexicographic() {
        let segs = vec![
            seg("S1", "a", "a", 1.0, 0.0),
            seg("S2", "b", "b", 1.0, 0.0),
            seg("S3", "c", "c", 1.0, 0.0),
        ];
        let subsets = enumerate_candidates(&segs, 2, 0.0);
        let ids: Vec<Vec<&str>> = subsets
            .iter()
            .map(|s| s.iter().map(|x| x.id.as_str()).collect())
            .collect();
        assert_eq!(
            ids,
            vec![
                vec!["S1"],
                vec!["S2"],
                vec!["S3"],
                vec!["S1", "S2"],
                vec!["S1", "S3"],
                vec!["S2", "S3"],
            ]
        );
    }

    #[test]
    fn test_enumerate_min_priority_filters() {
        // only criticality 1.0 with guessability 0.0 reaches priority 1.0
        let segs = vec![
            seg("S1", "a", "a", 1.0, 0.0),
            seg("S2", "b", "b", 1.0, 0.5),
            seg("S3", "c", "c", 0.5, 0.0),
        ];
        let subsets = enumerate_candidates(&segs, 1, 1.0);
        assert_eq!(subsets.len(), 1);
        assert_eq!(subsets[0][0].id, "S1");
        assert!(enumerate_candidates(&segs, 2, 2.0).is_empty());
    }

    #[test]
    fn test_verify_removal_is_case_sensitive() {
        let s = seg("S1", "the file", "use the file", 1.0, 0.0);
        assert!(!verify_removal("please use the file now", &s));
        assert!(verify_removal("please use the File now", &s));
        assert!(verify_removal("please use something", &s));
    }

    #[test]
    fn test_line_preservation_detects_drift() {
        let original = "line one\nline two with VALUE\nline three";
        check_line_preservation(original, "line one\nreplaced\nline three", &["VALUE"]).unwrap();
        // untouched line three edited
        let err =
            check_line_preservation(original, "line one\nreplaced\nline 3", &["VALUE"]).unwrap_err();
        assert!(err.contains("line three"));
        // untouched lines reordered
        assert!(
            check_line_preservation(original, "line three\nreplaced\nline one", &["VALUE"])
                .is_err()
        );
    }

    #[test]
    fn test_generate_variant_delete_passes_validation() {
        let task = excel_task();
        let subset = excel_segments();
        let variant = generate_variant(
            &task,
            &subset,
            RemovalStrategy::Delete,
            &gw(vec![good_response()]),
            &GenerationConfig::new("model-x"),
        )
        .unwrap();
        assert_eq!(variant.variant_id, "tac_excel_fmt_V_S1_S2_delete");
        assert_eq!(variant.parent_task_id, "tac_excel_fmt");
        assert!(verify_removal(&variant.underspecified_prompt, &subset[0]));
        assert!(verify_removal(&variant.underspecified_prompt, &subset[1]));
        assert_eq!(variant.expected_questions.len(), 2);
        assert_eq!(variant.strategy, RemovalStrategy::Delete);
    }

    #[test]
    fn test_leaked_value_triggers_regeneration() {
        let leaky = good_response().replace(
            "background color of top-header cells\\n",
            "background color of top-header cells to skyblue (#87CEEB)\\n",
        );
        // sanity: the first scripted response really does leak
        assert!(leaky.contains("#87CEEB"));
        let variant = generate_variant(
            &excel_task(),
            &excel_segments(),
            RemovalStrategy::Delete,
            &gw(vec![leaky, good_response()]),
            &GenerationConfig::new("model-x"),
        )
        .unwrap();
        assert!(!variant.underspecified_prompt.contains("#87CEEB"));
    }

    #[test]
    fn test_exhausted_retries_reports_offending_prompt() {
        let leaky = good_response().replace(
            "background color of top-header cells\\n",
            "background color of top-header cells to skyblue (#87CEEB)\\n",
        );
        let err = generate_variant(
            &excel_task(),
            &excel_segments(),
            RemovalStrategy::Delete,
            &gw(vec![leaky.clone(), leaky.clone(), leaky]),
            &GenerationConfig::new("model-x"),
        )
        .unwrap_err();
        match err {
            PipelineError::GenerationFailed {
                variant_id,
                reason,
                offending_prompt,
            } => {
                assert_eq!(variant_id, "tac_excel_fmt_V_S1_S2_delete");
                assert!(reason.contains("#87CEEB"));
                assert!(offending_prompt.contains("#87CEEB"));
            }
            other => panic!("expected GenerationFailed, got {other:?}"),
        }
    }

    #[test]
    fn test_missing_question_coverage_is_rejected() {
        let response = json!({
            "underspecified_prompt": EXCEL_DELETE,
            "expected_questions": [
                {"segment_id": "S1", "questions": ["What background color should the cells use?"]}
            ],
            "failure_mode": "wrong color"
        })
        .to_string();
        let err = generate_variant(
            &excel_task(),
            &excel_segments(),
            RemovalStrategy::Delete,
            &gw(vec![response.clone(), response.clone(), response]),
            &GenerationConfig::new("model-x"),
        )
        .unwrap_err();
        match err {
            PipelineError::GenerationFailed { reason, .. } => {
                assert!(reason.contains("S2"), "reason was: {reason}");
            }
            other => panic!("expected GenerationFailed, got {other:?}"),
        }
    }

    #[test]
    fn test_system_prompt_single_segment_matches_template_fill() {
        let subset = &excel_segments()[..1];
        let sys = system_prompt(subset, RemovalStrategy::Vaguify);
        assert!(sys.contains("- Dimension: constraint"));
        assert!(sys.contains("- Value: \"#87CEEB\""));
        assert!(sys.contains("Replace with vague language"));
        assert!(!sys.contains("{dimension}"));
        assert!(!sys.contains("### S1"));
    }

    #[test]
    fn test_system_prompt_multi_segment_has_one_stanza_each() {
        assert!(
            GENERATION_PROMPT.contains(SEGMENT_BLOCK),
            "template drifted from the block constant"
        );
        let sys = system_prompt(&excel_segments(), RemovalStrategy::Delete);
        assert!(sys.contains("### S1\n- Dimension: constraint"));
        assert!(sys.contains("### S2\n- Dimension: constraint"));
        assert!(sys.contains("- Value: \"horizontally centered\""));
        assert!(!sys.contains("{value}"));
    }

    #[test]
    fn test_user_prompt_lists_segment_ids() {
        let up = user_prompt(&excel_task(), &excel_segments());
        assert!(up.starts_with("## Original Task Prompt\nFind the respondent_counts.xlsx"));
        assert!(up.contains("- S1: \"#87CEEB\"\n- S2: \"horizontally centered\"\n"));
    }

    #[test]
    fn test_phase2_document_round_trips() {
        let variant = generate_variant(
            &excel_task(),
            &excel_segments(),
            RemovalStrategy::Delete,
            &gw(vec![good_response()]),
            &GenerationConfig::new("model-x"),
        )
        .unwrap();

        let doc = Phase2Document::from_variant(&variant);
        assert_eq!(doc.task_id, variant.variant_id);
        assert_eq!(doc.removed_segments[0].priority_score, 1.0);

        let json_text = serde_json::to_string_pretty(&doc).unwrap();
        // expected_questions entries are single-key maps keyed by segment id
        let raw: serde_json::Value = serde_json::from_str(&json_text).unwrap();
        assert!(raw["expected_questions"][0]["S1"].is_array());
        assert_eq!(raw["criteria"]["severity"], "delete");

        let parsed: Phase2Document = serde_json::from_str(&json_text).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(parsed.to_variant().unwrap(), variant);
    }

    #[test]
    fn test_phase2_rejects_inconsistent_priority() {
        let variant = generate_variant(
            &excel_task(),
            &excel_segments(),
            RemovalStrategy::Delete,
            &gw(vec![good_response()]),
            &GenerationConfig::new("model-x"),
        )
        .unwrap();
        let mut doc = Phase2Document::from_variant(&variant);
        doc.removed_segments[0].priority_score = 0.25;
        assert!(doc.to_variant().is_err());
    }
}
