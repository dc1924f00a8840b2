//! Gateway between the pipeline and text-generation providers.
//!
//! All model traffic goes through [`Gateway`], which layers three concerns
//! over a raw [`Provider`]:
//!
//! * canonical request digests, so any request can be recorded once and
//!   replayed deterministically from a fixture directory,
//! * structured-output enforcement with bounded validation retries, where
//!   the validation error is echoed back to the model,
//! * transport retry for flaky live providers.
//!
//! Replay mode performs no network activity at all; the replay provider
//! does not even construct an HTTP client.

mod digest;
mod provider;
mod schema;
mod structured;

pub use digest::{canonical_request_json, request_digest, sha256_hex};
pub use provider::{
    FixtureStore, LiveProvider, Provider, ProviderMode, RecordProvider, ReplayProvider,
    ScriptedProvider,
};
pub use schema::{FieldKind, FieldSpec, SchemaDescriptor};
pub use structured::{Attempt, Gateway, RetryPolicy};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single completion request. Equality of canonical forms defines fixture
/// identity, so every field that influences generation belongs here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub model_id: String,
    pub system_prompt: String,
    pub user_prompt: String,
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_output_tokens: Option<u32>,
    /// Name of the schema the response must satisfy, when structured output
    /// is expected. Part of the digest: the same prompts with different
    /// target schemas are different requests.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_schema: Option<String>,
}

impl GenerationRequest {
    pub fn new(model_id: impl Into<String>, system: impl Into<String>, user: impl Into<String>) -> Self {
        GenerationRequest {
            model_id: model_id.into(),
            system_prompt: system.into(),
            user_prompt: user.into(),
            temperature: 0.0,
            max_output_tokens: None,
            response_schema: None,
        }
    }

    pub fn with_temperature(mut self, t: f64) -> Self {
        self.temperature = t;
        self
    }

    pub fn with_schema(mut self, name: impl Into<String>) -> Self {
        self.response_schema = Some(name.into());
        self
    }
}

#[derive(Debug, Error)]
pub enum GatewayError {
    /// Transport-level failure after exhausting retries.
    #[error("provider transport failure: {0}")]
    Transport(String),

    /// Replay provider had no fixture for the request digest.
    #[error("missing fixture {digest} (model {model_id}, schema {schema:?})")]
    FixtureMiss {
        digest: String,
        model_id: String,
        schema: Option<String>,
    },

    /// The model never produced a response satisfying the schema within the
    /// retry budget. Carries every attempt for diagnosis.
    #[error("structured output failed after {} attempts: {}", attempts.len(), last_error(attempts))]
    StructuredOutput { attempts: Vec<Attempt> },

    #[error("fixture store error: {0}")]
    FixtureStore(String),

    #[error("provider configuration error: {0}")]
    Config(String),
}

fn last_error(attempts: &[Attempt]) -> String {
    attempts
        .last()
        .map(|a| a.error.clone())
        .unwrap_or_else(|| "no attempts recorded".into())
}
