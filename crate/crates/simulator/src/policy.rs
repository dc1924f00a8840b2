//! Answer policies: how much the simulated user is willing to infer.

use serde::{Deserialize, Serialize};

/// Standard policy template: compare prompts, hand over exact values.
pub const STANDARD_TEMPLATE: &str = include_str!("../prompts/user_sim_standard_v1.txt");
pub const STANDARD_TEMPLATE_VERSION: &str = "user_sim_standard_v1";

/// Strict policy template: answers only from the original text, refuses to
/// guess anything else.
pub const STRICT_TEMPLATE: &str = include_str!("../prompts/user_sim_strict_v1.txt");
pub const STRICT_TEMPLATE_VERSION: &str = "user_sim_strict_v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulatorPolicy {
    Standard,
    Strict,
}

impl SimulatorPolicy {
    pub const ALL: [SimulatorPolicy; 2] = [SimulatorPolicy::Standard, SimulatorPolicy::Strict];

    pub fn as_str(self) -> &'static str {
        match self {
            SimulatorPolicy::Standard => "standard",
            SimulatorPolicy::Strict => "strict",
        }
    }

    pub fn parse(s: &str) -> Option<SimulatorPolicy> {
        match s {
            "standard" => Some(SimulatorPolicy::Standard),
            "strict" => Some(SimulatorPolicy::Strict),
            _ => None,
        }
    }

    pub fn template_version(self) -> &'static str {
        match self {
            SimulatorPolicy::Standard => STANDARD_TEMPLATE_VERSION,
            SimulatorPolicy::Strict => STRICT_TEMPLATE_VERSION,
        }
    }

    /// Renders the simulator system prompt for one session.
    pub fn system_prompt(
        self,
        original_prompt: &str,
        underspecified_prompt: &str,
        removed_values: &[String],
    ) -> String {
        let values = removed_values
            .iter()
            .map(|v| format!("- {v}"))
            .collect::<Vec<_>>()
            .join("\n");
        match self {
            SimulatorPolicy::Standard => STANDARD_TEMPLATE
                .replace("{primary_task}", original_prompt)
                .replace("{underspecified_prompt}", underspecified_prompt)
                .replace("{removed_values}", &values)
                .replace("{additional_context}", ""),
            SimulatorPolicy::Strict => STRICT_TEMPLATE
                .replace("{original_prompt}", original_prompt)
                .replace("{underspecified_prompt}", underspecified_prompt)
                .replace("{removed_values}", &values),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_round_trip_names() {
        for p in SimulatorPolicy::ALL {
            assert_eq!(SimulatorPolicy::parse(p.as_str()), Some(p));
        }
        assert_eq!(SimulatorPolicy::parse("lenient"), None);
    }

    #[test]
    fn test_standard_fill() {
        let prompt = SimulatorPolicy::Standard.system_prompt(
            "Send the report to Alice at 9am",
            "Send the report",
            &["Alice".to_string(), "9am".to_string()],
        );
        assert!(prompt.contains("The user originally intended to give this COMPLETE prompt:\nSend the report to Alice at 9am"));
        assert!(prompt.contains("But they actually gave this UNDERSPECIFIED version:\nSend the report\n"));
        assert!(prompt.contains("- Alice\n- 9am"));
        assert!(!prompt.contains('{'), "unfilled placeholder left behind");
    }

    #[test]
    fn test_strict_fill() {
        let prompt = SimulatorPolicy::Strict.system_prompt(
            "Original text",
            "Vague text",
            &["detail".to_string()],
        );
        assert!(prompt.contains("> Original text"));
        assert!(prompt.contains("> Vague text"));
        assert!(prompt.contains("> - detail"));
        assert!(prompt.contains("DO NOT GUESS"));
        assert!(!prompt.contains("{original_prompt}"));
    }
}
