//! Structured-output enforcement with bounded validation retries.

use crate::{GatewayError, GenerationRequest, Provider, SchemaDescriptor};
use serde_json::Value;

/// One failed attempt at structured output.
#[derive(Debug, Clone)]
pub struct Attempt {
    pub response: String,
    pub error: String,
}

/// Validation retry budget. `max_attempts` counts the first try.
#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub max_attempts: usize,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 3 }
    }
}

/// The pipeline-facing handle over a provider.
pub struct Gateway {
    provider: Box<dyn Provider>,
    retry: RetryPolicy,
}

impl Gateway {
    pub fn new(provider: Box<dyn Provider>) -> Self {
        Gateway {
            provider,
            retry: RetryPolicy::default(),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    /// Free-text completion, no validation.
    pub fn complete(&self, request: &GenerationRequest) -> Result<String, GatewayError> {
        self.provider.complete(request)
    }

    /// Completion that must parse as JSON and satisfy `schema`.
    pub fn complete_structured(
        &self,
        request: &GenerationRequest,
        schema: &SchemaDescriptor,
    ) -> Result<Value, GatewayError> {
        self.complete_validated(request, schema, |v| Ok(v.clone()))
    }

    /// Completion that must parse as JSON, satisfy `schema`, and then parse
    /// through `extract` into a typed value. Any `Err` from `extract` counts
    /// as a validation failure and triggers a retry with the error text
    /// appended to the prompt, up to the retry budget. After the final
    /// failure the error carries every attempt.
    pub fn complete_validated<T>(
        &self,
        request: &GenerationRequest,
        schema: &SchemaDescriptor,
        extract: impl Fn(&Value) -> Result<T, String>,
    ) -> Result<T, GatewayError> {
        let mut attempts: Vec<Attempt> = Vec::new();
        for _ in 0..self.retry.max_attempts.max(1) {
            let attempt_request = match attempts.last() {
                None => request.clone(),
                Some(prev) => reprompt(request, &prev.error),
            };
            let response = self.provider.complete(&attempt_request)?;
            match try_parse(&response, schema, &extract) {
                Ok(value) => return Ok(value),
                Err(error) => {
                    log::debug!(
                        "structured attempt {} for schema {} failed: {error}",
                        attempts.len() + 1,
                        schema.name
                    );
                    attempts.push(Attempt { response, error });
                }
            }
        }
        Err(GatewayError::StructuredOutput { attempts })
    }
}

fn try_parse<T>(
    response: &str,
    schema: &SchemaDescriptor,
    extract: &impl Fn(&Value) -> Result<T, String>,
) -> Result<T, String> {
    let body = strip_code_fence(response);
    let value: Value =
        serde_json::from_str(body).map_err(|e| format!("response is not valid JSON: {e}"))?;
    schema.validate(&value)?;
    extract(&value)
}

fn reprompt(request: &GenerationRequest, error: &str) -> GenerationRequest {
    let mut next = request.clone();
    next.user_prompt = format!(
        "{}\n\nYour previous response was invalid: {error}\nRespond again with ONLY the corrected JSON.",
        request.user_prompt
    );
    next
}

/// Models often wrap JSON in a markdown fence despite instructions; accept
/// that one deviation rather than burning a retry on it.
fn strip_code_fence(text: &str) -> &str {
    let trimmed = text.trim();
    let Some(rest) = trimmed.strip_prefix("```") else {
        return trimmed;
    };
    let rest = rest.strip_prefix("json").unwrap_or(rest);
    let rest = rest.strip_prefix('\n').unwrap_or(rest);
    rest.strip_suffix("```").map(str::trim).unwrap_or(trimmed)
}
