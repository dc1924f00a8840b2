//! Ambiguity verdicts assigned to variants after trial classification.

use crate::CoreError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Empirical ambiguity class of an underspecified variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AmbiguityClass {
    /// No trial succeeded and outcomes differ (or the judge ruled the
    /// attempts were still the original task).
    #[serde(rename = "outcome-critical")]
    OutcomeCritical,
    /// Some trials succeed, but successful and failing outcomes coexist.
    #[serde(rename = "divergent")]
    Divergent,
    /// Every trial converges on the same successful outcome; the removal
    /// turned out not to matter.
    #[serde(rename = "benign")]
    Benign,
    /// All trials converge on one failing outcome and the judge found the
    /// agents were consistently solving a different task.
    #[serde(rename = "new-task")]
    NewTask,
}

impl AmbiguityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            AmbiguityClass::OutcomeCritical => "outcome-critical",
            AmbiguityClass::Divergent => "divergent",
            AmbiguityClass::Benign => "benign",
            AmbiguityClass::NewTask => "new-task",
        }
    }
}

impl fmt::Display for AmbiguityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Output of the judge that arbitrates the all-trials-fail, one-outcome case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeResult {
    pub task_completed: bool,
    pub reasoning: String,
}

/// Classification outcome for one variant, with the evidence that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityVerdict {
    pub class: AmbiguityClass,
    /// Trials observed.
    pub n: u64,
    /// Trials that succeeded.
    pub c: u64,
    /// Distinct canonical terminal states.
    pub unique_states: u64,
    /// Present exactly when the judge ran: c == 0 and unique_states == 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judge_result: Option<JudgeResult>,
}

impl AmbiguityVerdict {
    /// Consistency of the verdict with the classification rules. Useful when
    /// verdicts arrive from files rather than from the classifier itself.
    pub fn validate(&self) -> Result<(), CoreError> {
        let fail = |msg: String| Err(CoreError::ContractViolation(msg));
        if self.c > self.n {
            return fail(format!("verdict has c={} > n={}", self.c, self.n));
        }
        if self.n == 0 {
            return fail("verdict over zero trials".into());
        }
        if self.unique_states == 0 {
            return fail("verdict with zero unique states".into());
        }
        let judge_expected = self.c == 0 && self.unique_states == 1;
        if judge_expected != self.judge_result.is_some() {
            return fail(format!(
                "judge_result must be present iff c=0 and unique_states=1 (c={}, |S|={}, present={})",
                self.c,
                self.unique_states,
                self.judge_result.is_some()
            ));
        }
        let class_ok = match self.class {
            AmbiguityClass::Benign => self.c == self.n && self.unique_states == 1,
            AmbiguityClass::Divergent => self.c > 0 && self.unique_states > 1,
            AmbiguityClass::OutcomeCritical => self.c == 0,
            AmbiguityClass::NewTask => self.c == 0 && self.unique_states == 1,
        };
        if !class_ok {
            return fail(format!(
                "class {} inconsistent with n={}, c={}, unique_states={}",
                self.class, self.n, self.c, self.unique_states
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_class_serde_names() {
        assert_eq!(
            serde_json::to_string(&AmbiguityClass::OutcomeCritical).unwrap(),
            "\"outcome-critical\""
        );
        assert_eq!(
            serde_json::from_str::<AmbiguityClass>("\"new-task\"").unwrap(),
            AmbiguityClass::NewTask
        );
    }

    #[test]
    fn test_validate_enforces_judge_presence_rule() {
        let mut v = AmbiguityVerdict {
            class: AmbiguityClass::OutcomeCritical,
            n: 3,
            c: 0,
            unique_states: 2,
            judge_result: None,
        };
        v.validate().unwrap();

        // judge result on a two-state verdict is inconsistent
        v.judge_result = Some(JudgeResult {
            task_completed: false,
            reasoning: "n/a".into(),
        });
        assert!(v.validate().is_err());

        // single failing state requires a judge result
        let missing = AmbiguityVerdict {
            class: AmbiguityClass::OutcomeCritical,
            n: 3,
            c: 0,
            unique_states: 1,
            judge_result: None,
        };
        assert!(missing.validate().is_err());
    }

    #[test]
    fn test_validate_checks_class_against_counts() {
        let bogus = AmbiguityVerdict {
            class: AmbiguityClass::Benign,
            n: 3,
            c: 1,
            unique_states: 1,
            judge_result: None,
        };
        assert!(bogus.validate().is_err());
    }
}
