//! The information taxonomy: four dimensions, seventeen subdimensions.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Top-level category of information a prompt segment carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Goal,
    Constraint,
    Input,
    Context,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Dimension::Goal,
        Dimension::Constraint,
        Dimension::Input,
        Dimension::Context,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Goal => "goal",
            Dimension::Constraint => "constraint",
            Dimension::Input => "input",
            Dimension::Context => "context",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fine-grained category beneath a [`Dimension`].
///
/// Each subdimension belongs to exactly one dimension; [`Subdimension::dimension`]
/// gives the owner and validation rejects mismatched pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subdimension {
    // goal
    Target,
    Format,
    Content,
    Acceptance,
    // constraint
    NumericBound,
    Precision,
    Temporal,
    Selection,
    Method,
    // input
    Source,
    Location,
    Identifier,
    Version,
    // context
    Terminology,
    BusinessLogic,
    Conventions,
    ToolKnowledge,
}

impl Subdimension {
    pub const ALL: [Subdimension; 17] = [
        Subdimension::Target,
        Subdimension::Format,
        Subdimension::Content,
        Subdimension::Acceptance,
        Subdimension::NumericBound,
        Subdimension::Precision,
        Subdimension::Temporal,
        Subdimension::Selection,
        Subdimension::Method,
        Subdimension::Source,
        Subdimension::Location,
        Subdimension::Identifier,
        Subdimension::Version,
        Subdimension::Terminology,
        Subdimension::BusinessLogic,
        Subdimension::Conventions,
        Subdimension::ToolKnowledge,
    ];

    /// The dimension this subdimension belongs to.
    pub fn dimension(self) -> Dimension {
        use Subdimension::*;
        match self {
            Target | Format | Content | Acceptance => Dimension::Goal,
            NumericBound | Precision | Temporal | Selection | Method => Dimension::Constraint,
            Source | Location | Identifier | Version => Dimension::Input,
            Terminology | BusinessLogic | Conventions | ToolKnowledge => Dimension::Context,
        }
    }

    pub fn as_str(self) -> &'static str {
        use Subdimension::*;
        match self {
            Target => "target",
            Format => "format",
            Content => "content",
            Acceptance => "acceptance",
            NumericBound => "numeric_bound",
            Precision => "precision",
            Temporal => "temporal",
            Selection => "selection",
            Method => "method",
            Source => "source",
            Location => "location",
            Identifier => "identifier",
            Version => "version",
            Terminology => "terminology",
            BusinessLogic => "business_logic",
            Conventions => "conventions",
            ToolKnowledge => "tool_knowledge",
        }
    }
}

impl fmt::Display for Subdimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_taxonomy_has_seventeen_subdimensions() {
        assert_eq!(Subdimension::ALL.len(), 17);
        // four per dimension, except constraint which has five
        let count = |d: Dimension| {
            Subdimension::ALL
                .iter()
                .filter(|s| s.dimension() == d)
                .count()
        };
        assert_eq!(count(Dimension::Goal), 4);
        assert_eq!(count(Dimension::Constraint), 5);
        assert_eq!(count(Dimension::Input), 4);
        assert_eq!(count(Dimension::Context), 4);
    }

    #[test]
    fn test_serde_uses_snake_case() {
        assert_eq!(
            serde_json::to_string(&Subdimension::NumericBound).unwrap(),
            "\"numeric_bound\""
        );
        assert_eq!(
            serde_json::from_str::<Subdimension>("\"tool_knowledge\"").unwrap(),
            Subdimension::ToolKnowledge
        );
        assert_eq!(
            serde_json::to_string(&Dimension::Constraint).unwrap(),
            "\"constraint\""
        );
    }
}
