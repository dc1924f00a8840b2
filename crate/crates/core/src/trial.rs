//! Records of individual agent trials against a task variant.

use crate::TerminalState;
use serde::{Deserialize, Serialize};

/// How a trial ended from the harness's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Completed,
    Timeout,
    AdapterError,
}

/// One clarifying exchange between the agent and the simulated user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserCall {
    pub question: String,
    #[serde(default)]
    pub context: String,
    pub response: String,
    /// Agent step at which the question was asked, for timing analysis.
    pub step_index: u64,
}

/// Result of running one agent trial on one variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub variant_id: String,
    pub trial_index: u64,
    pub terminal_state: TerminalState,
    /// Recomputed by the harness from the task's success rule; never taken
    /// from the adapter.
    pub success: bool,
    #[serde(default)]
    pub user_calls: Vec<UserCall>,
    pub final_response: String,
    pub agent_config_id: String,
    pub status: TrialStatus,
    /// Total agent steps in the trajectory, when the adapter reports it.
    /// Needed to place questions within the first fraction of a run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_steps: Option<u64>,
}

impl TrialRecord {
    pub fn question_count(&self) -> usize {
        self.user_calls.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CheckpointOutcome;

    #[test]
    fn test_trial_record_round_trip() {
        let rec = TrialRecord {
            variant_id: "t1_V_S1_delete".into(),
            trial_index: 0,
            terminal_state: TerminalState::new(vec![
                CheckpointOutcome::Pass(true),
                CheckpointOutcome::Pass(false),
            ]),
            success: false,
            user_calls: vec![UserCall {
                question: "Which file should I read?".into(),
                context: String::new(),
                response: "april-attendance-data.csv".into(),
                step_index: 3,
            }],
            final_response: "done".into(),
            agent_config_id: "mock".into(),
            status: TrialStatus::Completed,
            total_steps: Some(20),
        };
        let json = serde_json::to_string(&rec).unwrap();
        let back: TrialRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.question_count(), 1);
    }

    #[test]
    fn test_status_serializes_snake_case() {
        assert_eq!(
            serde_json::to_string(&TrialStatus::AdapterError).unwrap(),
            "\"adapter_error\""
        );
    }
}
