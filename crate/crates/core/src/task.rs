//! Well-specified source tasks as ingested from a benchmark dataset.

use crate::{CheckpointOutcome, CoreError, TerminalState};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A fully specified task from a source benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task_id: String,
    pub dataset_id: String,
    pub prompt: String,
    /// Ordered checkpoint declarations; terminal states report one outcome
    /// per entry, in this order.
    pub checkpoint_spec: Vec<Checkpoint>,
    pub success_rule: SuccessRule,
    /// Whether checkpoint outcomes for this task are booleans or scalar
    /// scores. Fixed per dataset so canonical keys stay comparable.
    #[serde(default)]
    pub outcome_domain: OutcomeDomain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grounding_data: Option<GroundingData>,
}

/// One declared checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default, skip_serializing_if = "CheckpointKind::is_standard")]
    pub kind: CheckpointKind,
}

/// Role of a checkpoint under the fail-to-pass style success rule. Most
/// datasets leave everything `Standard`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckpointKind {
    #[default]
    Standard,
    /// A test the task is expected to flip from failing to passing.
    F2p,
    /// A previously passing test that must not regress.
    P2p,
}

impl CheckpointKind {
    fn is_standard(&self) -> bool {
        matches!(self, CheckpointKind::Standard)
    }
}

/// Value domain for checkpoint outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeDomain {
    #[default]
    Boolean,
    Scalar,
}

/// Maps a terminal checkpoint tuple to overall pass/fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SuccessRule {
    /// Every checkpoint must fully pass.
    AllPass,
    /// At least `fraction` of total checkpoint credit must be earned.
    Threshold { fraction: f64 },
    /// Every fail-to-pass checkpoint must pass and no pass-to-pass
    /// checkpoint may regress. Numerically this demands a full pass across
    /// the declared tuple; it exists as a distinct rule so intent is
    /// explicit and arity filters can find the F2P set.
    F2pNoRegression,
}

impl SuccessRule {
    /// Evaluates the rule against a terminal state. The harness recomputes
    /// this for every trial rather than trusting adapter-reported success.
    pub fn evaluate(
        &self,
        state: &TerminalState,
        spec: &[Checkpoint],
    ) -> Result<bool, CoreError> {
        if state.outcomes().len() != spec.len() {
            return Err(CoreError::ContractViolation(format!(
                "terminal state arity {} does not match checkpoint spec arity {}",
                state.outcomes().len(),
                spec.len()
            )));
        }
        match self {
            SuccessRule::AllPass | SuccessRule::F2pNoRegression => {
                Ok(state.outcomes().iter().all(CheckpointOutcome::is_full_pass))
            }
            SuccessRule::Threshold { fraction } => {
                if spec.is_empty() {
                    return Err(CoreError::ContractViolation(
                        "threshold rule over empty checkpoint spec".into(),
                    ));
                }
                let credit: f64 = state.outcomes().iter().map(CheckpointOutcome::credit).sum();
                Ok(credit / spec.len() as f64 >= *fraction)
            }
        }
    }
}

/// Optional dataset-supplied grounding: a golden trajectory and per-checkpoint
/// annotations, given to extraction so it can score trajectory usage.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GroundingData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub checkpoint_notes: BTreeMap<String, String>,
}

impl TaskRecord {
    /// Number of declared fail-to-pass checkpoints.
    pub fn f2p_arity(&self) -> usize {
        self.checkpoint_spec
            .iter()
            .filter(|c| c.kind == CheckpointKind::F2p)
            .count()
    }

    /// The all-fail terminal state in this task's outcome domain, used when
    /// a trial times out or the adapter errors.
    pub fn all_fail_state(&self) -> TerminalState {
        let outcome = match self.outcome_domain {
            OutcomeDomain::Boolean => CheckpointOutcome::Pass(false),
            OutcomeDomain::Scalar => CheckpointOutcome::Score(0.0),
        };
        TerminalState::new(vec![outcome; self.checkpoint_spec.len()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize) -> Vec<Checkpoint> {
        (1..=n)
            .map(|i| Checkpoint {
                id: format!("CP{i}"),
                description: String::new(),
                kind: CheckpointKind::Standard,
            })
            .collect()
    }

    fn bools(bits: &[bool]) -> TerminalState {
        TerminalState::new(bits.iter().map(|b| CheckpointOutcome::Pass(*b)).collect())
    }

    #[test]
    fn test_all_pass_rule() {
        let rule = SuccessRule::AllPass;
        assert!(rule.evaluate(&bools(&[true, true]), &spec(2)).unwrap());
        assert!(!rule.evaluate(&bools(&[true, false]), &spec(2)).unwrap());
    }

    #[test]
    fn test_threshold_rule_at_boundary() {
        let rule = SuccessRule::Threshold { fraction: 0.75 };
        // 3 of 4 = exactly 0.75 counts as success
        assert!(rule
            .evaluate(&bools(&[true, true, true, false]), &spec(4))
            .unwrap());
        assert!(!rule
            .evaluate(&bools(&[true, true, false, false]), &spec(4))
            .unwrap());
    }

    #[test]
    fn test_arity_mismatch_is_contract_violation() {
        let rule = SuccessRule::AllPass;
        assert!(rule.evaluate(&bools(&[true]), &spec(2)).is_err());
    }

    #[test]
    fn test_f2p_arity_counts_only_f2p() {
        let mut cps = spec(4);
        cps[0].kind = CheckpointKind::F2p;
        cps[1].kind = CheckpointKind::F2p;
        cps[2].kind = CheckpointKind::P2p;
        let task = TaskRecord {
            task_id: "t".into(),
            dataset_id: "d".into(),
            prompt: "p".into(),
            checkpoint_spec: cps,
            success_rule: SuccessRule::F2pNoRegression,
            outcome_domain: OutcomeDomain::Boolean,
            grounding_data: None,
        };
        assert_eq!(task.f2p_arity(), 2);
    }

    #[test]
    fn test_success_rule_serde_shape() {
        let json = serde_json::to_string(&SuccessRule::Threshold { fraction: 0.75 }).unwrap();
        assert_eq!(json, r#"{"kind":"threshold","fraction":0.75}"#);
        let rule: SuccessRule = serde_json::from_str(r#"{"kind":"all_pass"}"#).unwrap();
        assert_eq!(rule, SuccessRule::AllPass);
    }
}
