//! Scripted mock agents.
//!
//! A mock agent replays a per-trial script: which questions to ask, what
//! terminal state to report, what to say at the end. Questions are real
//! HTTP calls to the user tool, so a mock exercises the same wire path a
//! live agent would, end to end, with fully predictable behavior.

use crate::adapter::{AdapterError, AdapterRequest, AdapterResponse, AgentAdapter};
use serde::{Deserialize, Serialize};
use std::time::Duration;
use underspec_core::{TerminalState, TrialStatus, UserCall};

fn default_agent_id() -> String {
    "mock".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockScript {
    #[serde(default = "default_agent_id")]
    pub agent_id: String,
    /// One entry per trial index.
    pub trials: Vec<MockTrial>,
}

impl MockScript {
    pub fn from_file(path: &std::path::Path) -> Result<Self, AdapterError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| AdapterError::Protocol(format!("bad mock script {path:?}: {e}")))
    }
}

fn default_trial_status() -> TrialStatus {
    TrialStatus::Completed
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockTrial {
    pub terminal_state: TerminalState,
    #[serde(default)]
    pub questions: Vec<MockQuestion>,
    pub final_response: String,
    #[serde(default = "default_trial_status")]
    pub status: TrialStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_steps: Option<u64>,
    /// Artificial runtime, for exercising timeout handling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sleep_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockQuestion {
    pub question: String,
    #[serde(default)]
    pub context: String,
    pub step_index: u64,
}

pub struct MockAgent {
    script: MockScript,
    client: reqwest::blocking::Client,
}

impl MockAgent {
    pub fn new(script: MockScript) -> Self {
        MockAgent {
            script,
            client: reqwest::blocking::Client::new(),
        }
    }
}

#[derive(Deserialize)]
struct AskReply {
    response: String,
}

impl AgentAdapter for MockAgent {
    fn id(&self) -> &str {
        &self.script.agent_id
    }

    fn run(&self, request: &AdapterRequest) -> Result<AdapterResponse, AdapterError> {
        let trial = self
            .script
            .trials
            .get(request.trial_index as usize)
            .ok_or_else(|| {
                AdapterError::Protocol(format!(
                    "script has {} trials, none for index {}",
                    self.script.trials.len(),
                    request.trial_index
                ))
            })?;

        if let Some(seconds) = trial.sleep_seconds {
            std::thread::sleep(Duration::from_secs_f64(seconds));
        }

        // questions go over the wire only when a user is actually available
        let mut user_calls = Vec::new();
        if let Some(endpoint) = &request.user_tool_endpoint {
            for q in &trial.questions {
                let reply: AskReply = self
                    .client
                    .post(endpoint)
                    .timeout(Duration::from_secs(request.timeout_seconds.max(1)))
                    .json(&serde_json::json!({
                        "question": q.question,
                        "context": q.context,
                    }))
                    .send()
                    .map_err(|e| AdapterError::Protocol(format!("user tool call failed: {e}")))?
                    .error_for_status()
                    .map_err(|e| AdapterError::Protocol(format!("user tool rejected: {e}")))?
                    .json()
                    .map_err(|e| AdapterError::Protocol(format!("bad user tool reply: {e}")))?;
                user_calls.push(UserCall {
                    question: q.question.clone(),
                    context: q.context.clone(),
                    response: reply.response,
                    step_index: q.step_index,
                });
            }
        }

        // fold the answers into the final response so leakage and
        // integration checks can see what the user actually said
        let mut final_response = trial.final_response.clone();
        for call in &user_calls {
            final_response.push_str("\nUser said: ");
            final_response.push_str(&call.response);
        }

        Ok(AdapterResponse {
            terminal_state: trial.terminal_state.clone(),
            final_response,
            user_calls,
            status: trial.status,
            total_steps: trial.total_steps,
        })
    }
}

/// Stdio entry point: reads one request line, writes one response line.
/// This is what `SubprocessAdapter` launches for offline end-to-end runs.
pub fn run_stdio(script: MockScript) -> Result<(), AdapterError> {
    let mut line = String::new();
    std::io::stdin().read_line(&mut line)?;
    let request: AdapterRequest = serde_json::from_str(line.trim())
        .map_err(|e| AdapterError::Protocol(format!("bad request line: {e}")))?;
    let response = MockAgent::new(script).run(&request)?;
    println!("{}", serde_json::to_string(&response).expect("response serializes"));
    Ok(())
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use underspec_core::CheckpointOutcome;

    fn state(bits: &[bool]) -> TerminalState {
        TerminalState::new(bits.iter().map(|b| CheckpointOutcome::Pass(*b)).collect())
    }

    fn script() -> MockScript {
        MockScript {
            agent_id: "mock-eager".to_string(),
            trials: vec![
                MockTrial {
                    terminal_state: state(&[true, true]),
                    questions: vec![MockQuestion {
                        question: "Which color?".to_string(),
                        context: "The prompt names no color".to_string(),
                        step_index: 2,
                    }],
                    final_response: "Painted as requested.".to_string(),
                    status: TrialStatus::Completed,
                    total_steps: Some(24),
                    sleep_seconds: None,
                },
                MockTrial {
                    terminal_state: state(&[false, true]),
                    questions: vec![],
                    final_response: "Guessed.".to_string(),
                    status: TrialStatus::Completed,
                    total_steps: None,
                    sleep_seconds: None,
                },
            ],
        }
    }

    fn request(trial_index: u64, endpoint: Option<String>) -> AdapterRequest {
        AdapterRequest {
            variant_id: "v".to_string(),
            prompt: "Paint the header".to_string(),
            system_prompt_suffix: String::new(),
            user_tool_endpoint: endpoint,
            trial_index,
            timeout_seconds: 5,
        }
    }

    /// Minimal user-tool stand-in: answers every POST with a fixed response.
    fn fake_user_tool(answer: &'static str) -> (std::net::SocketAddr, std::thread::JoinHandle<Vec<String>>) {
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let handle = std::thread::spawn(move || {
            let mut seen = Vec::new();
            // serve exactly one request; tests asking more spawn more servers
            let (mut stream, _) = listener.accept().unwrap();
            let mut buf = vec![0u8; 65536];
            let n = stream.read(&mut buf).unwrap();
            seen.push(String::from_utf8_lossy(&buf[..n]).to_string());
            let body = format!("{{\"response\":\"{answer}\"}}");
            write!(
                stream,
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\n\r\n{}",
                body.len(),
                body
            )
            .unwrap();
            seen
        });
        (addr, handle)
    }

    #[test]
    fn test_mock_asks_through_the_wire() {
        let (addr, server) = fake_user_tool("Sky blue.");
        let agent = MockAgent::new(script());
        let out = agent
            .run(&request(0, Some(format!("http://{addr}/sessions/s/ask"))))
            .unwrap();
        assert_eq!(out.user_calls.len(), 1);
        assert_eq!(out.user_calls[0].response, "Sky blue.");
        assert_eq!(out.user_calls[0].step_index, 2);
        assert_eq!(out.total_steps, Some(24));
        assert!(
            out.final_response.contains("User said: Sky blue."),
            "answers should surface in the final response"
        );
        let seen = server.join().unwrap();
        assert!(seen[0].contains("\"question\":\"Which color?\""));
        assert!(seen[0].contains("\"context\":\"The prompt names no color\""));
    }

    #[test]
    fn test_mock_without_endpoint_stays_silent() {
        let agent = MockAgent::new(script());
        let out = agent.run(&request(0, None)).unwrap();
        assert!(out.user_calls.is_empty(), "no user available, no calls");
        assert_eq!(out.final_response, "Painted as requested.");
    }

    #[test]
    fn test_mock_missing_trial_index_is_protocol_error() {
        let agent = MockAgent::new(script());
        let err = agent.run(&request(7, None)).unwrap_err();
        assert!(matches!(err, AdapterError::Protocol(_)));
        assert!(err.to_string().contains("index 7"));
    }

    #[test]
    fn test_script_serde_round_trip() {
        let text = serde_json::to_string_pretty(&script()).unwrap();
        let back: MockScript = serde_json::from_str(&text).unwrap();
        assert_eq!(back, script());

        // defaults fill in sparse scripts
        let sparse: MockScript = serde_json::from_str(
            r#"{"trials": [{"terminal_state": [true], "final_response": "ok"}]}"#,
        )
        .unwrap();
        assert_eq!(sparse.agent_id, "mock");
        assert_eq!(sparse.trials[0].status, TrialStatus::Completed);
        assert!(sparse.trials[0].questions.is_empty());
    }
}
