//! Session lifecycle: open with the withheld information, ask questions,
//! read the transcript back.
//!
//! A session is addressed by a deterministic id derived from its inputs, so
//! opening the same variant twice resumes the existing session instead of
//! forking a second user. Callers that genuinely want parallel users for one
//! variant (e.g. independent trials) disambiguate with `client_key`.

use crate::SimulatorPolicy;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Mutex;
use thiserror::Error;
use underspec_gateway::{sha256_hex, Gateway, GatewayError, GenerationRequest};

/// Simulator answers sample at a fixed nonzero temperature: real users vary
/// in phrasing, and trial-to-trial variation is part of what the trials
/// measure.
pub const ANSWER_TEMPERATURE: f64 = 0.7;

/// Attempts allowed for one answer; blank completions are retried.
const ANSWER_ATTEMPTS: u32 = 3;

#[derive(Debug, Error)]
pub enum SimulatorError {
    #[error("invalid session inputs: {0}")]
    InvalidSession(String),

    #[error("unknown session {0}")]
    UnknownSession(String),

    #[error("question must not be empty")]
    EmptyQuestion,

    #[error("model returned a blank answer {0} times")]
    BlankAnswer(u32),

    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

/// Everything the simulated user knows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionInputs {
    pub variant_id: String,
    pub original_prompt: String,
    pub underspecified_prompt: String,
    pub removed_values: Vec<String>,
    /// Distinguishes otherwise-identical sessions, e.g. per-trial users.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client_key: Option<String>,
}

impl SessionInputs {
    fn validate(&self) -> Result<(), SimulatorError> {
        let fail = |msg: String| Err(SimulatorError::InvalidSession(msg));
        if self.variant_id.is_empty() {
            return fail("variant_id is empty".to_string());
        }
        if self.original_prompt.is_empty() {
            return fail("original prompt is empty".to_string());
        }
        if self.underspecified_prompt.is_empty() {
            return fail("underspecified prompt is empty".to_string());
        }
        for value in &self.removed_values {
            if value.is_empty() {
                return fail("removed value is empty".to_string());
            }
            if !self.original_prompt.contains(value.as_str()) {
                return fail(format!(
                    "removed value {value:?} does not appear in the original prompt; \
                     the user cannot answer about information they never had"
                ));
            }
        }
        Ok(())
    }
}

/// Deterministic session id: hash of the canonical JSON of the inputs.
pub fn session_id(inputs: &SessionInputs) -> String {
    let canonical = serde_json::to_value(inputs)
        .expect("session inputs serialize")
        .to_string();
    format!("sess_{}", &sha256_hex(canonical.as_bytes())[..32])
}

/// One question/answer exchange, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub question: String,
    #[serde(default)]
    pub context: String,
    pub response: String,
}

#[derive(Debug, Clone)]
pub struct SimulatorSession {
    pub id: String,
    pub inputs: SessionInputs,
    pub transcript: Vec<Exchange>,
}

#[derive(Debug, Clone)]
pub struct SimulatorConfig {
    pub model_id: String,
    pub policy: SimulatorPolicy,
    pub max_output_tokens: Option<u32>,
}

impl SimulatorConfig {
    pub fn new(model_id: impl Into<String>) -> Self {
        SimulatorConfig {
            model_id: model_id.into(),
            policy: SimulatorPolicy::Standard,
            max_output_tokens: None,
        }
    }

    pub fn with_policy(mut self, policy: SimulatorPolicy) -> Self {
        self.policy = policy;
        self
    }
}

/// The exact request one ask will send. Exposed so fixture tooling can
/// record against the same digest the live service uses.
pub fn ask_request(
    inputs: &SessionInputs,
    config: &SimulatorConfig,
    question: &str,
    context: &str,
) -> GenerationRequest {
    let system = config.policy.system_prompt(
        &inputs.original_prompt,
        &inputs.underspecified_prompt,
        &inputs.removed_values,
    );
    let user = if context.is_empty() {
        question.to_string()
    } else {
        format!("{question}\n\nContext: {context}")
    };
    GenerationRequest {
        max_output_tokens: config.max_output_tokens,
        ..GenerationRequest::new(&config.model_id, system, user)
    }
    .with_temperature(ANSWER_TEMPERATURE)
}

/// Thread-safe session table. The lock is never held across a model call.
#[derive(Default)]
pub struct SessionRegistry {
    sessions: Mutex<HashMap<String, SimulatorSession>>,
}

impl SessionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Opens (or resumes) the session for these inputs. Returns the id and
    /// whether it was newly created; an existing transcript is preserved.
    pub fn open(&self, inputs: SessionInputs) -> Result<(String, bool), SimulatorError> {
        inputs.validate()?;
        let id = session_id(&inputs);
        let mut sessions = self.sessions.lock().expect("session lock poisoned");
        if sessions.contains_key(&id) {
            return Ok((id, false));
        }
        sessions.insert(
            id.clone(),
            SimulatorSession {
                id: id.clone(),
                inputs,
                transcript: Vec::new(),
            },
        );
        Ok((id, true))
    }

    pub fn inputs(&self, id: &str) -> Result<SessionInputs, SimulatorError> {
        self.sessions
            .lock()
            .expect("session lock poisoned")
            .get(id)
            .map(|s| s.inputs.clone())
            .ok_or_else(|| SimulatorError::UnknownSession(id.to_string()))
    }

    pub fn transcript(&self, id: &str) -> Result<Vec<Exchange>, SimulatorError> {
        self.sessions
            .lock()
            .expect("session lock poisoned")
            .get(id)
            .map(|s| s.transcript.clone())
            .ok_or_else(|| SimulatorError::UnknownSession(id.to_string()))
    }

    pub fn close(&self, id: &str) -> Result<(), SimulatorError> {
        self.sessions
            .lock()
            .expect("session lock poisoned")
            .remove(id)
            .map(|_| ())
            .ok_or_else(|| SimulatorError::UnknownSession(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("session lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn append(&self, id: &str, exchange: Exchange) -> Result<(), SimulatorError> {
        self.sessions
            .lock()
            .expect("session lock poisoned")
            .get_mut(id)
            .map(|s| s.transcript.push(exchange))
            .ok_or_else(|| SimulatorError::UnknownSession(id.to_string()))
    }
}

/// Registry plus the model connection: what the HTTP and MCP servers hold.
pub struct SimulatorService {
    pub registry: SessionRegistry,
    gateway: Gateway,
    config: SimulatorConfig,
}

impl SimulatorService {
    pub fn new(gateway: Gateway, config: SimulatorConfig) -> Self {
        SimulatorService {
            registry: SessionRegistry::new(),
            gateway,
            config,
        }
    }

    pub fn config(&self) -> &SimulatorConfig {
        &self.config
    }

    /// Answers one question in a session and appends the exchange to its
    /// transcript.
    pub fn ask(
        &self,
        session_id: &str,
        question: &str,
        context: &str,
    ) -> Result<String, SimulatorError> {
        if question.trim().is_empty() {
            return Err(SimulatorError::EmptyQuestion);
        }
        let inputs = self.registry.inputs(session_id)?;
        let request = ask_request(&inputs, &self.config, question, context);

        let mut response = None;
        for attempt in 1..=ANSWER_ATTEMPTS {
            let answer = self.gateway.complete(&request)?;
            if answer.trim().is_empty() {
                log::warn!("blank simulator answer on attempt {attempt} for {session_id}");
                continue;
            }
            response = Some(answer);
            break;
        }
        let response = response.ok_or(SimulatorError::BlankAnswer(ANSWER_ATTEMPTS))?;

        self.registry.append(
            session_id,
            Exchange {
                question: question.to_string(),
                context: context.to_string(),
                response: response.clone(),
            },
        )?;
        Ok(response)
    }
}

// ---------------------------------------------------------------------------
