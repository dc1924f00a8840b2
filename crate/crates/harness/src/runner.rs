//! Trial execution: n trials of one variant through an adapter, with
//! per-trial user sessions and recomputed success.

use crate::adapter::{AdapterError, AdapterRequest, AgentAdapter};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use thiserror::Error;
use underspec_core::{TaskRecord, TrialRecord, TrialStatus, UnderspecifiedVariant};

/// Appended to the agent's system prompt whenever a user tool is attached.
pub const AGENT_SUFFIX: &str = include_str!("../prompts/agent_suffix_v1.txt");
pub const AGENT_SUFFIX_VERSION: &str = "agent_suffix_v1";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Every trial died before the agent produced a state. That is broken
    /// wiring, not agent failure, and must not be scored as one.
    #[error("all {n} trials of {variant_id} failed in the adapter; check the agent wiring")]
    AllTrialsErrored { variant_id: String, n: u64 },
}

/// How many trials to run and under what conditions.
#[derive(Debug, Clone)]
pub struct TrialPlan {
    pub n_trials: u64,
    pub parallelism: usize,
    pub timeout_seconds: u64,
    /// Extra system-prompt text placed before everything else.
    pub system_prompt_override: Option<String>,
    /// Persona note appended last (see the simulator crate's personas).
    pub persona_suffix: Option<String>,
}

impl Default for TrialPlan {
    fn default() -> Self {
        TrialPlan {
            n_trials: 3,
            parallelism: 1,
            timeout_seconds: 1800,
            system_prompt_override: None,
            persona_suffix: None,
        }
    }
}

impl TrialPlan {
    pub fn new(n_trials: u64) -> Self {
        TrialPlan {
            n_trials,
            ..Default::default()
        }
    }
}

/// A running user-simulator service the trials should ask.
#[derive(Debug, Clone)]
pub struct UserToolBinding {
    pub base_url: String,
}

fn compose_suffix(plan: &TrialPlan, with_user: bool) -> String {
    let mut parts: Vec<&str> = Vec::new();
    if let Some(text) = &plan.system_prompt_override {
        parts.push(text);
    }
    let suffix = AGENT_SUFFIX.trim_end();
    if with_user {
        parts.push(suffix);
    }
    if let Some(persona) = &plan.persona_suffix {
        parts.push(persona);
    }
    parts.join("\n\n")
}

struct OpenedSession {
    session_id: String,
    ask_url: String,
}

fn open_session(
    client: &reqwest::blocking::Client,
    binding: &UserToolBinding,
    task: &TaskRecord,
    variant: &UnderspecifiedVariant,
    trial_index: u64,
) -> Result<OpenedSession, String> {
    let body = serde_json::json!({
        "variant_id": variant.variant_id,
        "original_prompt": task.prompt,
        "underspecified_prompt": variant.underspecified_prompt,
        "removed_values": variant.removed_values(),
        "client_key": format!("{}::trial{}", variant.variant_id, trial_index),
    });
    let reply: serde_json::Value = client
        .post(format!("{}/sessions", binding.base_url))
        .json(&body)
        .send()
        .map_err(|e| format!("user tool unreachable: {e}"))?
        .error_for_status()
        .map_err(|e| format!("user tool rejected session: {e}"))?
        .json()
        .map_err(|e| format!("bad session reply: {e}"))?;
    let session_id = reply["session_id"]
        .as_str()
        .ok_or("session reply missing session_id")?
        .to_string();
    let ask_path = reply["ask_path"]
        .as_str()
        .ok_or("session reply missing ask_path")?;
    Ok(OpenedSession {
        ask_url: format!("{}{}", binding.base_url, ask_path),
        session_id,
    })
}

fn close_session(
    client: &reqwest::blocking::Client,
    binding: &UserToolBinding,
    session_id: &str,
) {
    let url = format!("{}/sessions/{}", binding.base_url, session_id);
    if let Err(e) = client.delete(&url).send() {
        log::debug!("session cleanup failed for {session_id}: {e}");
    }
}

/// A trial that produced no agent state: timeout or adapter breakage. The
/// task's all-fail state stands in so downstream math stays total.
fn failed_trial(
    task: &TaskRecord,
    variant: &UnderspecifiedVariant,
    adapter_id: &str,
    trial_index: u64,
    status: TrialStatus,
) -> TrialRecord {
    TrialRecord {
        variant_id: variant.variant_id.clone(),
        trial_index,
        terminal_state: task.all_fail_state(),
        success: false,
        user_calls: Vec::new(),
        final_response: String::new(),
        agent_config_id: adapter_id.to_string(),
        status,
        total_steps: None,
    }
}

/// Runs `plan.n_trials` trials of `variant` and returns them ordered by
/// trial index. Success is recomputed from each reported terminal state via
/// the task's rule; the agent's opinion of its own success is never asked.
pub fn run_trials(
    task: &TaskRecord,
    variant: &UnderspecifiedVariant,
    adapter: &dyn AgentAdapter,
    user_tool: Option<&UserToolBinding>,
    plan: &TrialPlan,
) -> Result<Vec<TrialRecord>, HarnessError> {
    if variant.parent_task_id != task.task_id {
        return Err(HarnessError::ContractViolation(format!(
            "variant {} belongs to task {}, got task {}",
            variant.variant_id, variant.parent_task_id, task.task_id
        )));
    }
    if plan.n_trials == 0 {
        return Err(HarnessError::ContractViolation(
            "n_trials must be at least 1".to_string(),
        ));
    }

    let suffix = compose_suffix(plan, user_tool.is_some());
    let client = reqwest::blocking::Client::new();
    let next = AtomicU64::new(0);
    let results: Mutex<Vec<TrialRecord>> = Mutex::new(Vec::new());

    let run_one = |trial_index: u64| -> TrialRecord {
        let session = match user_tool {
            None => None,
            Some(binding) => match open_session(&client, binding, task, variant, trial_index) {
                Ok(open) => Some((binding, open)),
                Err(e) => {
                    log::error!(
                        "trial {trial_index} of {}: session open failed: {e}",
                        variant.variant_id
                    );
                    return failed_trial(
                        task,
                        variant,
                        adapter.id(),
                        trial_index,
                        TrialStatus::AdapterError,
                    );
                }
            },
        };

        let request = AdapterRequest {
            variant_id: variant.variant_id.clone(),
            prompt: variant.underspecified_prompt.clone(),
            system_prompt_suffix: suffix.clone(),
            user_tool_endpoint: session.as_ref().map(|(_, s)| s.ask_url.clone()),
            trial_index,
            timeout_seconds: plan.timeout_seconds,
        };

        let record = match adapter.run(&request) {
            Ok(resp) => {
                let arity_ok = task.checkpoint_spec.is_empty()
                    || resp.terminal_state.arity() == task.checkpoint_spec.len();
                if !arity_ok {
                    log::error!(
                        "trial {trial_index} of {}: terminal state arity {} does not match \
                         the {}-checkpoint task",
                        variant.variant_id,
                        resp.terminal_state.arity(),
                        task.checkpoint_spec.len()
                    );
                    failed_trial(
                        task,
                        variant,
                        adapter.id(),
                        trial_index,
                        TrialStatus::AdapterError,
                    )
                } else {
                    match task
                        .success_rule
                        .evaluate(&resp.terminal_state, &task.checkpoint_spec)
                    {
                        Ok(graded) => TrialRecord {
                            variant_id: variant.variant_id.clone(),
                            trial_index,
                            terminal_state: resp.terminal_state,
                            // a self-reported timeout never counts as success,
                            // whatever state it claims
                            success: graded && resp.status == TrialStatus::Completed,
                            user_calls: resp.user_calls,
                            final_response: resp.final_response,
                            agent_config_id: adapter.id().to_string(),
                            status: resp.status,
                            total_steps: resp.total_steps,
                        },
                        Err(e) => {
                            log::error!(
                                "trial {trial_index} of {}: ungradable state: {e}",
                                variant.variant_id
                            );
                            failed_trial(
                                task,
                                variant,
                                adapter.id(),
                                trial_index,
                                TrialStatus::AdapterError,
                            )
                        }
                    }
                }
            }
            Err(AdapterError::Timeout(seconds)) => {
                log::warn!(
                    "trial {trial_index} of {} timed out after {seconds}s",
                    variant.variant_id
                );
                failed_trial(task, variant, adapter.id(), trial_index, TrialStatus::Timeout)
            }
            Err(e) => {
                log::error!("trial {trial_index} of {}: {e}", variant.variant_id);
                failed_trial(
                    task,
                    variant,
                    adapter.id(),
                    trial_index,
                    TrialStatus::AdapterError,
                )
            }
        };

        if let Some((binding, open)) = session {
            close_session(&client, binding, &open.session_id);
        }
        record
    };

    let workers = plan.parallelism.max(1).min(plan.n_trials as usize);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= plan.n_trials {
                    break;
                }
                let record = run_one(index);
                results.lock().expect("results lock").push(record);
            });
        }
    });

    let mut trials = results.into_inner().expect("results lock");
    trials.sort_by_key(|t| t.trial_index);

    if trials.iter().all(|t| t.status == TrialStatus::AdapterError) {
        return Err(HarnessError::AllTrialsErrored {
            variant_id: variant.variant_id.clone(),
            n: plan.n_trials,
        });
    }
    Ok(trials)
}

// ---------------------------------------------------------------------------
