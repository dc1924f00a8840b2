//! User-availability personas appended to the agent's system prompt.
//!
//! These shape how eagerly the agent interrupts the user; the simulator's
//! own answers are unaffected.

use serde::{Deserialize, Serialize};

const SUPERVISOR: &str = include_str!("../prompts/persona_supervisor_v1.txt");
const STANDARD: &str = include_str!("../prompts/persona_standard_v1.txt");
const EXECUTIVE: &str = include_str!("../prompts/persona_executive_v1.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Persona {
    /// User is sitting right there; never guess.
    Supervisor,
    /// User is around and answers when asked.
    Standard,
    /// User is busy; interrupt only to avoid factual failure.
    Executive,
}

impl Persona {
    pub const ALL: [Persona; 3] = [Persona::Supervisor, Persona::Standard, Persona::Executive];

    pub fn as_str(self) -> &'static str {
        match self {
            Persona::Supervisor => "supervisor",
            Persona::Standard => "standard",
            Persona::Executive => "executive",
        }
    }

    pub fn parse(s: &str) -> Option<Persona> {
        match s {
            "supervisor" => Some(Persona::Supervisor),
            "standard" => Some(Persona::Standard),
            "executive" => Some(Persona::Executive),
            _ => None,
        }
    }

    pub fn suffix(self) -> &'static str {
        let text = match self {
            Persona::Supervisor => SUPERVISOR,
            Persona::Standard => STANDARD,
            Persona::Executive => EXECUTIVE,
        };
        text.trim_end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_round_trip_names() {
        for p in Persona::ALL {
            assert_eq!(Persona::parse(p.as_str()), Some(p));
        }
        assert_eq!(Persona::parse("manager"), None);
    }

    #[test]
    fn test_suffixes_are_distinct_notes() {
        for p in Persona::ALL {
            assert!(p.suffix().starts_with("Note: The user"));
            assert!(!p.suffix().ends_with('\n'));
        }
        assert!(Persona::Supervisor.suffix().contains("Do not guess"));
        assert!(Persona::Executive.suffix().contains("ONLY interrupt"));
        assert!(Persona::Standard.suffix().contains("available to answer"));
    }
}
