//! Underspecified task variants produced by removal.

use crate::{CoreError, Segment};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// How a segment's information is taken out of the prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalStrategy {
    /// Drop the information entirely, smoothing the sentence around it.
    Delete,
    /// Replace with vague wording ("the file", "the output").
    Vaguify,
    /// Replace with a generic reference ("appropriate format").
    Genericize,
}

impl RemovalStrategy {
    pub const ALL: [RemovalStrategy; 3] = [
        RemovalStrategy::Delete,
        RemovalStrategy::Vaguify,
        RemovalStrategy::Genericize,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RemovalStrategy::Delete => "delete",
            RemovalStrategy::Vaguify => "vaguify",
            RemovalStrategy::Genericize => "genericize",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "delete" => Some(RemovalStrategy::Delete),
            "vaguify" => Some(RemovalStrategy::Vaguify),
            "genericize" => Some(RemovalStrategy::Genericize),
            _ => None,
        }
    }
}

impl fmt::Display for RemovalStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Clarifying questions a competent agent should ask about one removed
/// segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedQuestions {
    pub segment_id: String,
    pub questions: Vec<String>,
}

/// A task prompt with one or more segments removed or obscured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnderspecifiedVariant {
    pub variant_id: String,
    pub parent_task_id: String,
    pub underspecified_prompt: String,
    pub removed_segments: Vec<Segment>,
    pub strategy: RemovalStrategy,
    pub expected_questions: Vec<ExpectedQuestions>,
    pub expected_failure_mode: String,
}

impl UnderspecifiedVariant {
    /// Structural checks that serde cannot express: at least one removed
    /// segment, no leaked values, expected questions keyed to real segments.
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.removed_segments.is_empty() {
            return Err(CoreError::ContractViolation(format!(
                "variant {} has no removed segments",
                self.variant_id
            )));
        }
        for seg in &self.removed_segments {
            if self.underspecified_prompt.contains(&seg.value) {
                return Err(CoreError::ContractViolation(format!(
                    "variant {} still contains removed value {:?}",
                    self.variant_id, seg.value
                )));
            }
        }
        let known: BTreeSet<&str> = self
            .removed_segments
            .iter()
            .map(|s| s.id.as_str())
            .collect();
        for eq in &self.expected_questions {
            if !known.contains(eq.segment_id.as_str()) {
                return Err(CoreError::ContractViolation(format!(
                    "variant {} expects questions for unknown segment {}",
                    self.variant_id, eq.segment_id
                )));
            }
        }
        Ok(())
    }

    /// The dimension reported for the variant as a whole: the dimension of
    /// its highest-priority removed segment (ties fall to the earlier one).
    pub fn headline_dimension(&self) -> Option<crate::Dimension> {
        // max_by would keep the last of equal maxima; strict > keeps the first
        self.removed_segments
            .iter()
            .fold(None::<&Segment>, |best, seg| match best {
                Some(b) if seg.priority() > b.priority() => Some(seg),
                None => Some(seg),
                _ => best,
            })
            .map(|s| s.dimension)
    }

    /// Removed values in segment order, as handed to the user simulator.
    pub fn removed_values(&self) -> Vec<String> {
        self.removed_segments
            .iter()
            .map(|s| s.value.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Dimension, Level3Score, Subdimension};

    fn seg(id: &str, value: &str, dim: Dimension, sub: Subdimension, c: f64, g: f64) -> Segment {
        Segment {
            id: id.into(),
            text: format!("... {value} ..."),
            value: value.into(),
            dimension: dim,
            subdimension: sub,
            criticality: Level3Score::from_f64(c).unwrap(),
            guessability: Level3Score::from_f64(g).unwrap(),
            grounding: None,
        }
    }

    fn variant() -> UnderspecifiedVariant {
        UnderspecifiedVariant {
            variant_id: "task_V_S1_delete".into(),
            parent_task_id: "task".into(),
            underspecified_prompt: "Make the header cells stand out.".into(),
            removed_segments: vec![seg(
                "S1",
                "#87CEEB",
                Dimension::Constraint,
                Subdimension::Precision,
                1.0,
                0.0,
            )],
            strategy: RemovalStrategy::Delete,
            expected_questions: vec![ExpectedQuestions {
                segment_id: "S1".into(),
                questions: vec!["What background color should the header cells use?".into()],
            }],
            expected_failure_mode: "agent picks an arbitrary color".into(),
        }
    }

    #[test]
    fn test_validate_accepts_clean_variant() {
        variant().validate().unwrap();
    }

    #[test]
    fn test_validate_rejects_leaked_value() {
        let mut v = variant();
        v.underspecified_prompt = "Use #87CEEB for the headers.".into();
        assert!(v.validate().is_err());
    }

    #[test]
    fn test_validate_rejects_unknown_question_target() {
        let mut v = variant();
        v.expected_questions[0].segment_id = "S9".into();
        assert!(v.validate().is_err());
    }

    #[test]
    fn test_headline_dimension_takes_highest_priority() {
        let mut v = variant();
        v.removed_segments.push(seg(
            "S2",
            "horizontally centered",
            Dimension::Goal,
            Subdimension::Format,
            0.5,
            0.5,
        ));
        // S1 priority 1.0 beats S2 priority 0.25
        assert_eq!(v.headline_dimension(), Some(Dimension::Constraint));
    }

    #[test]
    fn test_headline_dimension_tie_keeps_earlier_segment() {
        let mut v = variant();
        // same (criticality, guessability) as S1, so an exact priority tie
        v.removed_segments.push(seg(
            "S2",
            "horizontally centered",
            Dimension::Goal,
            Subdimension::Format,
            1.0,
            0.0,
        ));
        assert_eq!(v.headline_dimension(), Some(Dimension::Constraint));
    }

    #[test]
    fn test_strategy_string_round_trip() {
        for s in RemovalStrategy::ALL {
            assert_eq!(RemovalStrategy::parse(s.as_str()), Some(s));
        }
        assert_eq!(RemovalStrategy::parse("obfuscate"), None);
    }
}
