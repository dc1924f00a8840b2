//! Agent adapters and the wire contract they implement.
//!
//! An adapter is anything that can take one trial request and come back with
//! a terminal state: a subprocess speaking JSON over stdio, an HTTP service,
//! or an in-process mock. Adapters own their timeout enforcement; `run` must
//! return within roughly `request.timeout_seconds`.

use serde::{Deserialize, Serialize};
use std::io::Read;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};
use thiserror::Error;
use underspec_core::{TerminalState, TrialStatus, UserCall};

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("adapter io failure: {0}")]
    Io(#[from] std::io::Error),

    /// The adapter ran but broke the wire contract: bad JSON, nonzero exit,
    /// unexpected HTTP status.
    #[error("adapter protocol violation: {0}")]
    Protocol(String),

    #[error("adapter exceeded the {0}s budget")]
    Timeout(u64),
}

/// One trial, as handed to an agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterRequest {
    pub variant_id: String,
    /// The underspecified prompt the agent must attempt.
    pub prompt: String,
    /// Extra system-prompt text (user-tool usage note, persona, overrides),
    /// empty when there is none.
    #[serde(default)]
    pub system_prompt_suffix: String,
    /// Where to POST clarifying questions, when a user is available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_tool_endpoint: Option<String>,
    pub trial_index: u64,
    pub timeout_seconds: u64,
}

fn default_status() -> TrialStatus {
    TrialStatus::Completed
}

/// What the agent reports back. `success` is deliberately absent: the
/// harness recomputes it from the terminal state and the task's rule rather
/// than trusting the agent's own grading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterResponse {
    pub terminal_state: TerminalState,
    pub final_response: String,
    #[serde(default)]
    pub user_calls: Vec<UserCall>,
    #[serde(default = "default_status")]
    pub status: TrialStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_steps: Option<u64>,
}

pub trait AgentAdapter: Send + Sync {
    /// Stable identifier recorded on every trial this adapter produces.
    fn id(&self) -> &str;

    fn run(&self, request: &AdapterRequest) -> Result<AdapterResponse, AdapterError>;
}

// ---------------------------------------------------------------------------
// Subprocess adapter

/// Runs an executable per trial. The request is written to the child's
/// stdin as one JSON line; the response is the last non-empty line of its
/// stdout (earlier lines may be progress output). Children that outlive the
/// budget are killed.
pub struct SubprocessAdapter {
    id: String,
    program: String,
    args: Vec<String>,
}

impl SubprocessAdapter {
    pub fn new(id: impl Into<String>, program: impl Into<String>, args: Vec<String>) -> Self {
        SubprocessAdapter {
            id: id.into(),
            program: program.into(),
            args,
        }
    }
}

impl AgentAdapter for SubprocessAdapter {
    fn id(&self) -> &str {
        &self.id
    }

    fn run(&self, request: &AdapterRequest) -> Result<AdapterResponse, AdapterError> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()?;

        {
            use std::io::Write;
            let mut stdin = child.stdin.take().expect("stdin piped");
            let line = serde_json::to_string(request).expect("request serializes");
            stdin.write_all(line.as_bytes())?;
            stdin.write_all(b"\n")?;
            // dropping stdin closes the pipe so line-readers see EOF
        }

        // drain stdout on a thread so a chatty child cannot fill the pipe
        // and deadlock against our wait loop
        let mut stdout_pipe = child.stdout.take().expect("stdout piped");
        let reader = std::thread::spawn(move || {
            let mut buf = String::new();
            let _ = stdout_pipe.read_to_string(&mut buf);
            buf
        });

        let deadline = Instant::now() + Duration::from_secs(request.timeout_seconds);
        let status = loop {
            match child.try_wait()? {
                Some(status) => break status,
                None if Instant::now() >= deadline => {
                    log::warn!(
                        "killing {} trial {} after {}s",
                        request.variant_id,
                        request.trial_index,
                        request.timeout_seconds
                    );
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(AdapterError::Timeout(request.timeout_seconds));
                }
                None => std::thread::sleep(Duration::from_millis(20)),
            }
        };

        let stdout = reader.join().unwrap_or_default();
        if !status.success() {
            let mut stderr = String::new();
            if let Some(mut pipe) = child.stderr.take() {
                let _ = pipe.read_to_string(&mut stderr);
            }
            return Err(AdapterError::Protocol(format!(
                "agent exited with {status}: {}",
                stderr.trim()
            )));
        }

        let line = stdout
            .lines()
            .rev()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| AdapterError::Protocol("agent produced no output".to_string()))?;
        serde_json::from_str(line)
            .map_err(|e| AdapterError::Protocol(format!("bad response line: {e}")))
    }
}

// ---------------------------------------------------------------------------
// HTTP adapter

/// POSTs each trial to a long-running agent service.
pub struct HttpAdapter {
    id: String,
    endpoint: String,
    client: reqwest::blocking::Client,
}

impl HttpAdapter {
    pub fn new(id: impl Into<String>, endpoint: impl Into<String>) -> Self {
        HttpAdapter {
            id: id.into(),
            endpoint: endpoint.into(),
            client: reqwest::blocking::Client::new(),
        }
    }
}

impl AgentAdapter for HttpAdapter {
    fn id(&self) -> &str {
        &self.id
    }

    fn run(&self, request: &AdapterRequest) -> Result<AdapterResponse, AdapterError> {
        let reply = self
            .client
            .post(&self.endpoint)
            .timeout(Duration::from_secs(request.timeout_seconds))
            .json(request)
            .send()
            .map_err(|e| {
                if e.is_timeout() {
                    AdapterError::Timeout(request.timeout_seconds)
                } else {
                    AdapterError::Protocol(format!("request failed: {e}"))
                }
            })?;
        if !reply.status().is_success() {
            return Err(AdapterError::Protocol(format!(
                "agent service returned {}",
                reply.status()
            )));
        }
        reply
            .json()
            .map_err(|e| AdapterError::Protocol(format!("bad response body: {e}")))
    }
}

// ---------------------------------------------------------------------------
