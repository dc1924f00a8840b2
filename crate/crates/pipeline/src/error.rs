use underspec_core::CoreError;
use underspec_gateway::GatewayError;

/// Errors raised by pipeline stages.
#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    /// A model exchange failed (transport, fixture miss, or structured
    /// output exhausted its retries).
    #[error(transparent)]
    Gateway(#[from] GatewayError),

    /// A shared-type invariant was violated.
    #[error(transparent)]
    Core(#[from] CoreError),

    /// The model produced zero segments that survive validation.
    #[error("extraction produced no valid segments for task {task_id}")]
    ExtractionEmpty { task_id: String },

    /// Variant generation kept failing post-validation after all
    /// regeneration attempts; the last offending prompt is preserved so the
    /// failure can be inspected.
    #[error("generation for {variant_id} failed validation after retries: {reason}")]
    GenerationFailed {
        variant_id: String,
        reason: String,
        offending_prompt: String,
    },

    /// The new-task judge could not produce a usable verdict; the variant is
    /// excluded from the benchmark rather than guessed at.
    #[error("new-task judge failed for this variant: {0}")]
    JudgeFailure(String),

    /// Trial data contradicts itself, e.g. two trials with identical
    /// terminal states but different success flags.
    #[error("inconsistent trial data: {0}")]
    InconsistentTrials(String),

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    ContractViolation(String),
}
