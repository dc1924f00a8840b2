//! Extracted prompt segments and their grounding metadata.

use crate::{priority_score, CoreError, Dimension, Level3Score, Subdimension};
use serde::{Deserialize, Serialize};

/// One extracted piece of task-critical information.
///
/// `value` is always an exact substring of the parent task prompt; `text` is
/// the surrounding span that gives it meaning. Ids are assigned in extraction
/// order as "S1", "S2", ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub id: String,
    pub text: String,
    pub value: String,
    pub dimension: Dimension,
    pub subdimension: Subdimension,
    pub criticality: Level3Score,
    pub guessability: Level3Score,
    /// Present only when the parent task carried grounding data. The fields
    /// serialize flattened into the segment object, matching the on-disk
    /// document layout.
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub grounding: Option<Grounding>,
}

/// How a segment's value is used in the golden trajectory, when one exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grounding {
    pub is_used_in_trajectory: bool,
    /// Position of first use as a fraction of trajectory length, in [0, 1].
    pub first_use_pct: f64,
    /// Checkpoint ids whose evaluation depends on this value.
    pub checkpoint_refs: Vec<String>,
}

impl Segment {
    /// `criticality * (1 - guessability)`; see [`priority_score`].
    pub fn priority(&self) -> f64 {
        priority_score(self.criticality, self.guessability)
    }

    /// Checks the dimension/subdimension pairing, which serde alone cannot.
    pub fn check_taxonomy(&self) -> Result<(), CoreError> {
        if self.subdimension.dimension() == self.dimension {
            Ok(())
        } else {
            Err(CoreError::DimensionMismatch {
                dimension: self.dimension.to_string(),
                subdimension: self.subdimension.to_string(),
            })
        }
    }
}

/// Byte offsets of every occurrence of `value` in `prompt`.
///
/// Multi-occurrence values are legal; removal must later eliminate all of
/// them, so callers track the full list rather than just the first hit.
pub fn value_occurrences(prompt: &str, value: &str) -> Vec<usize> {
    if value.is_empty() {
        return Vec::new();
    }
    let mut offsets = Vec::new();
    let mut from = 0;
    while let Some(pos) = prompt[from..].find(value) {
        offsets.push(from + pos);
        from += pos + 1; // overlapping occurrences count too
        if from >= prompt.len() {
            break;
        }
    }
    offsets
}

#[cfg(test)]
mod tests {
    use super::*;

    fn payroll_segment_json() -> &'static str {
        // grounding fields sit at the top level of the object, not nested
        r#"{
            "id": "S1",
            "text": "Use \"april-attendance-data.csv\" and \"salary-rates.pdf\"",
            "value": "april-attendance-data.csv",
            "dimension": "input",
            "subdimension": "identifier",
            "criticality": 1.0,
            "guessability": 0.5,
            "is_used_in_trajectory": true,
            "first_use_pct": 0.15,
            "checkpoint_refs": ["CP1", "CP2"]
        }"#
    }

    #[test]
    fn test_grounding_fields_flatten() {
        let seg: Segment = serde_json::from_str(payroll_segment_json()).unwrap();
        let g = seg.grounding.as_ref().expect("grounding present");
        assert!(g.is_used_in_trajectory);
        assert_eq!(g.first_use_pct, 0.15);
        assert_eq!(g.checkpoint_refs, vec!["CP1", "CP2"]);
        assert_eq!(seg.priority(), 0.5);

        let back = serde_json::to_value(&seg).unwrap();
        assert_eq!(back["first_use_pct"], 0.15);
        assert!(back.get("grounding").is_none());
    }

    #[test]
    fn test_grounding_absent_is_none() {
        let seg: Segment = serde_json::from_str(
            r##"{
                "id": "S1",
                "text": "background color to skyblue (#87CEEB)",
                "value": "#87CEEB",
                "dimension": "constraint",
                "subdimension": "precision",
                "criticality": 1.0,
                "guessability": 0.0
            }"##,
        )
        .unwrap();
        assert!(seg.grounding.is_none());
        assert_eq!(seg.priority(), 1.0);
        let back = serde_json::to_value(&seg).unwrap();
        assert!(back.get("is_used_in_trajectory").is_none());
    }

    #[test]
    fn test_taxonomy_mismatch_rejected() {
        let seg: Segment = serde_json::from_str(
            r#"{
                "id": "S1",
                "text": "t",
                "value": "t",
                "dimension": "goal",
                "subdimension": "identifier",
                "criticality": 0.5,
                "guessability": 0.0
            }"#,
        )
        .unwrap();
        assert!(seg.check_taxonomy().is_err());
    }

    #[test]
    fn test_value_occurrences_finds_all() {
        assert_eq!(value_occurrences("a b a b a", "a"), vec![0, 4, 8]);
        assert_eq!(value_occurrences("aaa", "aa"), vec![0, 1]);
        assert_eq!(value_occurrences("xyz", "q"), Vec::<usize>::new());
        assert_eq!(value_occurrences("xyz", ""), Vec::<usize>::new());
    }
}
