//! Phase 3 decision: ambiguity classification from empirical trials.
//!
//! The rule is a pure function of two numbers, with one escape hatch. Let
//! `c` be the number of successful trials and `S` the set of distinct
//! canonical terminal states:
//!
//! * `c > 0`, `|S| = 1` — benign: the agent reliably infers what was removed
//!   (and since success is a function of the terminal state, `c = n`).
//! * `c > 0`, `|S| > 1` — divergent: success and failure coexist.
//! * `c = 0`, `|S| > 1` — outcome-critical: the agent always fails, in
//!   different ways.
//! * `c = 0`, `|S| = 1` — the trials agree on a single failing outcome. Only
//!   here an LLM judge arbitrates: if the agents consistently completed a
//!   coherent *different* task, the variant is new-task (and excluded from
//!   benchmarks); otherwise it stays outcome-critical.

use crate::prompts::{fill_brace_escaped, NEW_TASK_JUDGE_PROMPT};
use crate::PipelineError;
use underspec_core::{unique_terminal_states, AmbiguityClass, AmbiguityVerdict, JudgeResult, TrialRecord};
use underspec_gateway::{
    FieldKind, FieldSpec, Gateway, GatewayError, GenerationRequest, SchemaDescriptor,
};

/// Arbitrates the all-fail, single-outcome case.
pub trait NewTaskJudge {
    fn judge(
        &self,
        underspecified_prompt: &str,
        final_responses: &[String],
    ) -> Result<JudgeResult, PipelineError>;
}

/// Model settings for the new-task judge. Temperature stays at 0.0.
#[derive(Debug, Clone)]
pub struct JudgeConfig {
    pub model_id: String,
    pub max_output_tokens: Option<u32>,
}

impl JudgeConfig {
    pub fn new(model_id: impl Into<String>) -> Self {
        JudgeConfig {
            model_id: model_id.into(),
            max_output_tokens: None,
        }
    }
}

/// The exact gateway request the judge sends. Exposed so fixture tooling can
/// address the same digest.
pub fn new_task_judge_request(
    underspecified_prompt: &str,
    final_responses: &[String],
    config: &JudgeConfig,
) -> GenerationRequest {
    let formatted: Vec<String> = final_responses
        .iter()
        .enumerate()
        .map(|(i, response)| format!("Trial {}:\n{response}", i + 1))
        .collect();
    let user = fill_brace_escaped(
        NEW_TASK_JUDGE_PROMPT,
        &[
            ("underspec_prompt", underspecified_prompt),
            ("formatted_responses", formatted.join("\n\n").as_str()),
        ],
    );
    // the template is self-contained, so it rides in the user message
    GenerationRequest {
        max_output_tokens: config.max_output_tokens,
        ..GenerationRequest::new(&config.model_id, "", user)
    }
    .with_schema("new_task_judge")
}

/// LLM-backed judge speaking through the gateway.
pub struct LlmNewTaskJudge<'g> {
    gateway: &'g Gateway,
    config: JudgeConfig,
}

impl<'g> LlmNewTaskJudge<'g> {
    pub fn new(gateway: &'g Gateway, config: JudgeConfig) -> Self {
        LlmNewTaskJudge { gateway, config }
    }
}

impl NewTaskJudge for LlmNewTaskJudge<'_> {
    fn judge(
        &self,
        underspecified_prompt: &str,
        final_responses: &[String],
    ) -> Result<JudgeResult, PipelineError> {
        let request = new_task_judge_request(underspecified_prompt, final_responses, &self.config);
        let schema = SchemaDescriptor::new(
            "new_task_judge",
            vec![
                FieldSpec::new("task_completed", FieldKind::Bool),
                FieldSpec::new("reasoning", FieldKind::String),
            ],
        )
        .strict();

        self.gateway
            .complete_validated(&request, &schema, |value| {
                serde_json::from_value::<JudgeResult>(value.clone())
                    .map_err(|e| format!("judge response shape invalid: {e}"))
            })
            .map_err(|err| match err {
                GatewayError::StructuredOutput { ref attempts } => PipelineError::JudgeFailure(
                    attempts
                        .last()
                        .map(|a| a.error.clone())
                        .unwrap_or_else(|| "no attempts recorded".into()),
                ),
                other => PipelineError::Gateway(other),
            })
    }
}

/// Fixed-verdict judge for tests and dry runs.
#[derive(Debug, Clone, Copy)]
pub struct StubJudge {
    pub task_completed: bool,
}

impl NewTaskJudge for StubJudge {
    fn judge(&self, _prompt: &str, _responses: &[String]) -> Result<JudgeResult, PipelineError> {
        Ok(JudgeResult {
            task_completed: self.task_completed,
            reasoning: "stubbed verdict".to_string(),
        })
    }
}

/// Classifies one variant's trial set. The judge is consulted only in the
/// `c = 0, |S| = 1` branch; the returned verdict carries its reasoning there
/// and nowhere else.
pub fn classify(
    trials: &[TrialRecord],
    underspecified_prompt: &str,
    judge: &dyn NewTaskJudge,
) -> Result<AmbiguityVerdict, PipelineError> {
    if trials.is_empty() {
        return Err(PipelineError::ContractViolation(
            "classify needs at least one trial".into(),
        ));
    }
    let variant_id = &trials[0].variant_id;
    if trials.iter().any(|t| &t.variant_id != variant_id) {
        return Err(PipelineError::ContractViolation(
            "classify got trials from more than one variant".into(),
        ));
    }

    let unique = unique_terminal_states(trials)?;
    let n = trials.len() as u64;
    let c = trials.iter().filter(|t| t.success).count() as u64;
    let s = unique.len() as u64;

    let (class, judge_result) = match (c > 0, s > 1) {
        (true, false) => {
            if c != n {
                // success is a function of the terminal state; one state
                // with mixed success flags means the adapter lied somewhere
                return Err(PipelineError::InconsistentTrials(format!(
                    "variant {variant_id}: one terminal state but {c}/{n} successes"
                )));
            }
            (AmbiguityClass::Benign, None)
        }
        (true, true) => (AmbiguityClass::Divergent, None),
        (false, true) => (AmbiguityClass::OutcomeCritical, None),
        (false, false) => {
            let responses: Vec<String> =
                trials.iter().map(|t| t.final_response.clone()).collect();
            let result = judge.judge(underspecified_prompt, &responses)?;
            let class = if result.task_completed {
                AmbiguityClass::NewTask
            } else {
                AmbiguityClass::OutcomeCritical
            };
            (class, Some(result))
        }
    };

    let verdict = AmbiguityVerdict {
        class,
        n,
        c,
        unique_states: s,
        judge_result,
    };
    verdict.validate()?;
    Ok(verdict)
}

// ---------------------------------------------------------------------------
