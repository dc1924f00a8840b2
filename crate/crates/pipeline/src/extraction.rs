//! Phase 1: segment extraction.
//!
//! A single model exchange turns a task prompt into candidate segments;
//! everything after that is local validation. Two failure classes are kept
//! apart deliberately. Structural problems (unparseable document, scores off
//! the three-level domain, taxonomy words that do not exist) mean the model
//! ignored the output contract, so they burn a gateway retry with the error
//! echoed back. Content problems (a value that is not a substring of the
//! prompt, a subdimension filed under the wrong dimension) are scored as
//! per-segment rejections: the offending segment is dropped and the rest
//! survive.

use crate::prompts::EXTRACTION_PROMPT;
use crate::PipelineError;
use serde::Deserialize;
use serde_json::Value;
use underspec_core::{
    value_occurrences, Dimension, Grounding, Level3Score, Segment, Subdimension, TaskRecord,
};
use underspec_gateway::{FieldKind, FieldSpec, Gateway, GenerationRequest, SchemaDescriptor};

/// Model settings for extraction. Temperature is pinned to 0.0; extraction
/// should be as deterministic as the provider allows.
#[derive(Debug, Clone)]
pub struct ExtractionConfig {
    pub model_id: String,
    pub max_output_tokens: Option<u32>,
}

impl ExtractionConfig {
    pub fn new(model_id: impl Into<String>) -> Self {
        ExtractionConfig {
            model_id: model_id.into(),
            max_output_tokens: None,
        }
    }
}

/// One segment as the model emitted it, before validation. Scores arrive as
/// raw numbers and taxonomy labels as raw strings so validation can reject
/// them with a precise reason instead of a serde error.
#[derive(Debug, Clone, Deserialize)]
pub struct SegmentDraft {
    pub text: String,
    pub value: String,
    pub dimension: String,
    pub subdimension: String,
    pub criticality: f64,
    pub guessability: f64,
    #[serde(default)]
    pub is_used_in_trajectory: Option<bool>,
    #[serde(default)]
    pub first_use_pct: Option<f64>,
    #[serde(default)]
    pub checkpoint_refs: Option<Vec<String>>,
}

/// Outcome of validating one draft against the task prompt.
#[derive(Debug, Clone)]
pub enum SegmentValidation {
    Valid {
        segment: Segment,
        /// Byte offsets of every occurrence of the value in the prompt.
        /// Generation must remove all of them.
        occurrences: Vec<usize>,
    },
    Rejected {
        reasons: Vec<String>,
    },
}

/// Validates a draft and, on success, builds the [`Segment`] with the given
/// id. Grounding fields are kept only when `attach_grounding` is set, i.e.
/// when the parent task actually carried grounding data; a model that
/// hallucinates trajectory fields for an ungrounded task gets them stripped.
pub fn validate_segment(
    prompt: &str,
    id: &str,
    draft: &SegmentDraft,
    attach_grounding: bool,
) -> SegmentValidation {
    let mut reasons = Vec::new();

    if draft.value.is_empty() {
        reasons.push("value is empty".to_string());
    }
    let occurrences = value_occurrences(prompt, &draft.value);
    if !draft.value.is_empty() && occurrences.is_empty() {
        reasons.push(format!(
            "value {:?} is not an exact substring of the prompt",
            draft.value
        ));
    }
    if !draft.text.contains(&draft.value) {
        reasons.push(format!(
            "text {:?} does not contain value {:?}",
            draft.text, draft.value
        ));
    }

    let criticality = Level3Score::from_f64(draft.criticality);
    if criticality.is_err() {
        reasons.push(format!(
            "criticality {} is not one of 0.0, 0.5, 1.0",
            draft.criticality
        ));
    }
    let guessability = Level3Score::from_f64(draft.guessability);
    if guessability.is_err() {
        reasons.push(format!(
            "guessability {} is not one of 0.0, 0.5, 1.0",
            draft.guessability
        ));
    }

    let dimension = parse_dimension(&draft.dimension);
    if dimension.is_none() {
        reasons.push(format!("unknown dimension {:?}", draft.dimension));
    }
    let subdimension = parse_subdimension(&draft.subdimension);
    if subdimension.is_none() {
        reasons.push(format!("unknown subdimension {:?}", draft.subdimension));
    }
    if let (Some(d), Some(s)) = (dimension, subdimension) {
        if s.dimension() != d {
            reasons.push(format!(
                "subdimension {s} belongs to dimension {}, not {d}",
                s.dimension()
            ));
        }
    }

    if let Some(pct) = draft.first_use_pct {
        if !(0.0..=1.0).contains(&pct) {
            reasons.push(format!("first_use_pct {pct} outside [0, 1]"));
        }
    }

    if !reasons.is_empty() {
        return SegmentValidation::Rejected { reasons };
    }

    let grounding = if attach_grounding {
        Some(Grounding {
            is_used_in_trajectory: draft.is_used_in_trajectory.unwrap_or(false),
            first_use_pct: draft.first_use_pct.unwrap_or(0.0),
            checkpoint_refs: draft.checkpoint_refs.clone().unwrap_or_default(),
        })
    } else {
        None
    };

    SegmentValidation::Valid {
        segment: Segment {
            id: id.to_string(),
            text: draft.text.clone(),
            value: draft.value.clone(),
            dimension: dimension.unwrap(),
            subdimension: subdimension.unwrap(),
            criticality: criticality.unwrap(),
            guessability: guessability.unwrap(),
            grounding,
        },
        occurrences,
    }
}

/// Orders segments by descending priority score; ties prefer lower
/// guessability (harder to recover, so more interesting to remove), then
/// extraction order. Returns a permutation of the input.
pub fn rank_segments(segments: &[Segment]) -> Vec<Segment> {
    let mut ranked = segments.to_vec();
    // priorities live on a quarter grid and guessability on a half grid, so
    // rounding to integers makes the sort key exact
    ranked.sort_by_key(|s| {
        let quarters = (s.priority() * 4.0).round() as u32;
        let guess_halves = (s.guessability.value() * 2.0).round() as u32;
        (std::cmp::Reverse(quarters), guess_halves)
    });
    ranked
}

/// The exact gateway request extraction will send for this task. Exposed so
/// fixture tooling can address the same digest.
pub fn extraction_request(task: &TaskRecord, config: &ExtractionConfig) -> GenerationRequest {
    GenerationRequest {
        max_output_tokens: config.max_output_tokens,
        ..GenerationRequest::new(&config.model_id, EXTRACTION_PROMPT, task_context(task))
    }
    .with_schema("segment_extraction")
}

/// Runs the extraction exchange for one task and returns validated segments
/// with ids "S1", "S2", ... in emission order.
pub fn extract_segments(
    task: &TaskRecord,
    gateway: &Gateway,
    config: &ExtractionConfig,
) -> Result<Vec<Segment>, PipelineError> {
    let request = extraction_request(task, config);

    let schema = SchemaDescriptor::new(
        "segment_extraction",
        vec![FieldSpec::new("segments", FieldKind::Array)],
    );

    let drafts: Vec<SegmentDraft> = gateway.complete_validated(&request, &schema, parse_drafts)?;

    let attach_grounding = task.grounding_data.is_some();
    let mut segments = Vec::new();
    for draft in &drafts {
        let id = format!("S{}", segments.len() + 1);
        match validate_segment(&task.prompt, &id, draft, attach_grounding) {
            SegmentValidation::Valid { segment, .. } => segments.push(segment),
            SegmentValidation::Rejected { reasons } => {
                log::info!(
                    "task {}: dropping segment with value {:?}: {}",
                    task.task_id,
                    draft.value,
                    reasons.join("; ")
                );
            }
        }
    }

    if segments.is_empty() {
        return Err(PipelineError::ExtractionEmpty {
            task_id: task.task_id.clone(),
        });
    }
    Ok(segments)
}

/// Structural parse of the model document. Failures here (including scores
/// off the three-level domain) are contract breaches and trigger a gateway
/// retry with the message echoed back.
fn parse_drafts(value: &Value) -> Result<Vec<SegmentDraft>, String> {
    let drafts: Vec<SegmentDraft> = serde_json::from_value(value["segments"].clone())
        .map_err(|e| format!("segments array is malformed: {e}"))?;
    if drafts.is_empty() {
        return Err("segments array is empty; emit at least one segment".to_string());
    }
    for (i, draft) in drafts.iter().enumerate() {
        for (field, score) in [
            ("criticality", draft.criticality),
            ("guessability", draft.guessability),
        ] {
            if Level3Score::from_f64(score).is_err() {
                return Err(format!(
                    "segment {}: {field} must use ONLY 0.0, 0.5, or 1.0 (got {score})",
                    i + 1
                ));
            }
        }
        if parse_dimension(&draft.dimension).is_none() {
            return Err(format!(
                "segment {}: dimension {:?} is not in the taxonomy",
                i + 1,
                draft.dimension
            ));
        }
        if parse_subdimension(&draft.subdimension).is_none() {
            return Err(format!(
                "segment {}: subdimension {:?} is not in the taxonomy",
                i + 1,
                draft.subdimension
            ));
        }
    }
    Ok(drafts)
}

/// The user message: the raw prompt, plus grounding sections when present.
fn task_context(task: &TaskRecord) -> String {
    let mut out = task.prompt.clone();
    if let Some(grounding) = &task.grounding_data {
        if let Some(trajectory) = &grounding.trajectory {
            out.push_str("\n\n## Golden Trajectory\n");
            out.push_str(trajectory);
        }
        if !grounding.checkpoint_notes.is_empty() {
            out.push_str("\n\n## Checkpoints\n");
            for (id, note) in &grounding.checkpoint_notes {
                out.push_str(&format!("- {id}: {note}\n"));
            }
        }
    }
    out
}

fn parse_dimension(s: &str) -> Option<Dimension> {
    serde_json::from_value(Value::String(s.to_string())).ok()
}

fn parse_subdimension(s: &str) -> Option<Subdimension> {
    serde_json::from_value(Value::String(s.to_string())).ok()
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;
    use underspec_core::{GroundingData, SuccessRule};
    use underspec_gateway::ScriptedProvider;

    const EXCEL_PROMPT: &str = "Change the background color of top-header cells to skyblue (#87CEEB)\nMake sure all cell values are horizontally centered in their cells";

    fn draft(value: &str, text: &str) -> SegmentDraft {
        SegmentDraft {
            text: text.to_string(),
            value: value.to_string(),
            dimension: "constraint".to_string(),
            subdimension: "precision".to_string(),
            criticality: 1.0,
            guessability: 0.0,
            is_used_in_trajectory: None,
            first_use_pct: None,
            checkpoint_refs: None,
        }
    }

    fn seg(c: f64, g: f64, id: &str) -> Segment {
        Segment {
            id: id.to_string(),
            text: "... v ...".to_string(),
            value: "v".to_string(),
            dimension: Dimension::Goal,
            subdimension: Subdimension::Target,
            criticality: Level3Score::from_f64(c).unwrap(),
            guessability: Level3Score::from_f64(g).unwrap(),
            grounding: None,
        }
    }

    #[test]
    fn test_validate_accepts_exact_span() {
        let d = draft("#87CEEB", "top-header cells to skyblue (#87CEEB)");
        match validate_segment(EXCEL_PROMPT, "S1", &d, false) {
            SegmentValidation::Valid {
                segment,
                occurrences,
            } => {
                assert_eq!(segment.id, "S1");
                assert_eq!(occurrences.len(), 1);
                assert!(segment.grounding.is_none());
            }
            SegmentValidation::Rejected { reasons } => panic!("rejected: {reasons:?}"),
        }
    }

    #[test]
    fn test_validate_rejects_with_reasons() {
        // value not a substring
        let d = draft("#FF0000", "cells to #FF0000");
        assert!(matches!(
            validate_segment(EXCEL_PROMPT, "S1", &d, false),
            SegmentValidation::Rejected { .. }
        ));

        // empty value
        let d = draft("", "");
        assert!(matches!(
            validate_segment(EXCEL_PROMPT, "S1", &d, false),
            SegmentValidation::Rejected { .. }
        ));

        // score off the domain
        let mut d = draft("#87CEEB", "skyblue (#87CEEB)");
        d.criticality = 0.75;
        let SegmentValidation::Rejected { reasons } = validate_segment(EXCEL_PROMPT, "S1", &d, false)
        else {
            panic!("0.75 criticality must be rejected")
        };
        assert!(reasons.iter().any(|r| r.contains("criticality")));

        // text must contain value
        let mut d = draft("#87CEEB", "the header cells");
        d.text = "the header cells".to_string();
        assert!(matches!(
            validate_segment(EXCEL_PROMPT, "S1", &d, false),
            SegmentValidation::Rejected { .. }
        ));

        // subdimension from the wrong dimension
        let mut d = draft("#87CEEB", "skyblue (#87CEEB)");
        d.subdimension = "identifier".to_string();
        assert!(matches!(
            validate_segment(EXCEL_PROMPT, "S1", &d, false),
            SegmentValidation::Rejected { .. }
        ));

        // first_use_pct out of range
        let mut d = draft("#87CEEB", "skyblue (#87CEEB)");
        d.first_use_pct = Some(1.5);
        assert!(matches!(
            validate_segment(EXCEL_PROMPT, "S1", &d, true),
            SegmentValidation::Rejected { .. }
        ));
    }

    #[test]
    fn test_rank_orders_by_priority_then_guessability() {
        let input = vec![seg(1.0, 0.0, "a"), seg(1.0, 0.5, "b"), seg(0.5, 0.0, "c")];
        // priorities 1.0, 0.5, 0.5; the tie goes to c (guessability 0.0)
        let ranked = rank_segments(&input);
        let ids: Vec<&str> = ranked.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, vec!["a", "c", "b"]);
    }

    #[test]
    fn test_rank_is_stable_for_equal_keys() {
        let input = vec![seg(0.5, 0.5, "x"), seg(0.5, 0.5, "y"), seg(0.5, 0.5, "z")];
        let ids: Vec<String> = rank_segments(&input).into_iter().map(|s| s.id).collect();
        assert_eq!(ids, vec!["x", "y", "z"]);
    }

    proptest! {
        #[test]
        fn prop_rank_is_a_permutation(scores in proptest::collection::vec((0u8..3, 0u8..3), 0..12)) {
            let input: Vec<Segment> = scores
                .iter()
                .enumerate()
                .map(|(i, (c, g))| seg(*c as f64 * 0.5, *g as f64 * 0.5, &format!("s{i}")))
                .collect();
            let ranked = rank_segments(&input);
            prop_assert_eq!(ranked.len(), input.len());
            let mut in_ids: Vec<&String> = input.iter().map(|s| &s.id).collect();
            let mut out_ids: Vec<&String> = ranked.iter().map(|s| &s.id).collect();
            in_ids.sort();
            out_ids.sort();
            prop_assert_eq!(in_ids, out_ids);
            // descending priority throughout
            for w in ranked.windows(2) {
                prop_assert!(w[0].priority() >= w[1].priority());
            }
        }
    }

    // --- end-to-end against a scripted provider ---

    fn task(grounded: bool) -> TaskRecord {
        TaskRecord {
            task_id: "excel_fmt".to_string(),
            dataset_id: "fixture".to_string(),
            prompt: EXCEL_PROMPT.to_string(),
            checkpoint_spec: Vec::new(),
            success_rule: SuccessRule::AllPass,
            outcome_domain: Default::default(),
            grounding_data: grounded.then(|| GroundingData {
                trajectory: Some("open file; set fill color; center cells".to_string()),
                checkpoint_notes: BTreeMap::from([(
                    "CP1".to_string(),
                    "header fill is #87CEEB".to_string(),
                )]),
            }),
        }
    }

    fn segments_doc(extra: &str) -> String {
        format!(
            r##"{{"segments": [
                {{"text": "skyblue (#87CEEB)", "value": "#87CEEB",
                  "dimension": "constraint", "subdimension": "precision",
                  "criticality": 1.0, "guessability": 0.0,
                  "is_used_in_trajectory": true, "first_use_pct": 0.4,
                  "checkpoint_refs": ["CP1"]}}{extra}
            ]}}"##
        )
    }

    fn gateway_with(responses: Vec<String>) -> Gateway {
        Gateway::new(Box::new(ScriptedProvider::new(responses)))
    }

    #[test]
    fn test_extract_assigns_ids_and_filters_bad_spans() {
        let bad_span = r##",
                {"text": "respondents.xlsx", "value": "respondents.xlsx",
                 "dimension": "input", "subdimension": "identifier",
                 "criticality": 1.0, "guessability": 0.5},
                {"text": "horizontally centered in their cells", "value": "horizontally centered",
                 "dimension": "constraint", "subdimension": "method",
                 "criticality": 0.5, "guessability": 0.5}"##;
        let gw = gateway_with(vec![segments_doc(bad_span)]);
        let segments =
            extract_segments(&task(false), &gw, &ExtractionConfig::new("model-x")).unwrap();
        // the respondents.xlsx span is not in the prompt and gets dropped;
        // survivors are renumbered densely
        assert_eq!(segments.len(), 2);
        assert_eq!(segments[0].id, "S1");
        assert_eq!(segments[0].value, "#87CEEB");
        assert_eq!(segments[1].id, "S2");
        assert_eq!(segments[1].value, "horizontally centered");
        assert!(segments.iter().all(|s| s.grounding.is_none()));
    }

    #[test]
    fn test_extract_attaches_grounding_only_when_task_has_it() {
        let gw = gateway_with(vec![segments_doc("")]);
        let segments =
            extract_segments(&task(true), &gw, &ExtractionConfig::new("model-x")).unwrap();
        let g = segments[0].grounding.as_ref().expect("grounding kept");
        assert!(g.is_used_in_trajectory);
        assert_eq!(g.first_use_pct, 0.4);
        assert_eq!(g.checkpoint_refs, vec!["CP1"]);
    }

    #[test]
    fn test_off_domain_score_burns_a_retry() {
        let bad = segments_doc("").replace("\"criticality\": 1.0", "\"criticality\": 0.7");
        let gw = gateway_with(vec![bad, segments_doc("")]);
        let segments =
            extract_segments(&task(false), &gw, &ExtractionConfig::new("model-x")).unwrap();
        assert_eq!(segments.len(), 1);
    }

    #[test]
    fn test_all_spans_invalid_is_extraction_empty() {
        let doc = r#"{"segments": [
            {"text": "nope", "value": "nope", "dimension": "goal",
             "subdimension": "target", "criticality": 1.0, "guessability": 0.0}
        ]}"#;
        let gw = gateway_with(vec![doc.to_string()]);
        let err = extract_segments(&task(false), &gw, &ExtractionConfig::new("model-x"))
            .unwrap_err();
        assert!(matches!(err, PipelineError::ExtractionEmpty { .. }));
    }

    #[test]
    fn test_user_message_carries_grounding_sections() {
        let ctx = task_context(&task(true));
        assert!(ctx.starts_with(EXCEL_PROMPT));
        assert!(ctx.contains("## Golden Trajectory"));
        assert!(ctx.contains("- CP1: header fill is #87CEEB"));
        assert_eq!(task_context(&task(false)), EXCEL_PROMPT);
    }
}
