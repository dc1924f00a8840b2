//! Versioned prompt templates, embedded verbatim.
//!
//! Model behavior in this pipeline is defined by exact prompt texts, so they
//! live as resource files under `prompts/` rather than inline string
//! constants, each with a version tag in its filename. Code in this module
//! only fills placeholders; it never rewrites template wording.

use underspec_core::RemovalStrategy;
use underspec_gateway::sha256_hex;

pub const EXTRACTION_PROMPT_VERSION: &str = "extraction_v1";
pub const EXTRACTION_PROMPT: &str = include_str!("../prompts/extraction_v1.txt");

pub const GENERATION_PROMPT_VERSION: &str = "generation_v1";
pub const GENERATION_PROMPT: &str = include_str!("../prompts/generation_v1.txt");

pub const NEW_TASK_JUDGE_PROMPT_VERSION: &str = "new_task_judge_v1";
pub const NEW_TASK_JUDGE_PROMPT: &str = include_str!("../prompts/new_task_judge_v1.txt");

pub const FAILURE_JUDGE_PROMPT_VERSION: &str = "failure_judge_v1";
pub const FAILURE_JUDGE_PROMPT: &str = include_str!("../prompts/failure_judge_v1.txt");

/// Response-format footer appended after the flag definitions when composing
/// the failure-judge system prompt. Kept separate so the flag definitions
/// stay pristine.
pub const FAILURE_JUDGE_FORMAT_VERSION: &str = "failure_judge_format_v1";
pub const FAILURE_JUDGE_FORMAT: &str = include_str!("../prompts/failure_judge_format_v1.txt");

const SEVERITY_DELETE: &str = include_str!("../prompts/severity_delete_v1.txt");
const SEVERITY_VAGUIFY: &str = include_str!("../prompts/severity_vaguify_v1.txt");
const SEVERITY_GENERICIZE: &str = include_str!("../prompts/severity_genericize_v1.txt");

/// The strategy-specific instruction spliced into the generation prompt's
/// "Removal Strategy" slot.
pub fn severity_instruction(strategy: RemovalStrategy) -> &'static str {
    match strategy {
        RemovalStrategy::Delete => SEVERITY_DELETE.trim_end_matches('\n'),
        RemovalStrategy::Vaguify => SEVERITY_VAGUIFY.trim_end_matches('\n'),
        RemovalStrategy::Genericize => SEVERITY_GENERICIZE.trim_end_matches('\n'),
    }
}

/// Replaces `{name}` tokens with their values. Braces that do not form a
/// known placeholder pass through untouched, so templates may contain
/// literal JSON examples.
pub fn fill(template: &str, pairs: &[(&str, &str)]) -> String {
    let mut out = template.to_owned();
    for (name, value) in pairs {
        out = out.replace(&format!("{{{name}}}"), value);
    }
    out
}

/// Placeholder filling for templates that escape literal braces by doubling
/// them (`{{` / `}}`), as the new-task judge template does around its JSON
/// example. Unknown single-brace spans pass through verbatim.
pub fn fill_brace_escaped(template: &str, pairs: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let bytes = template.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if template[i..].starts_with("{{") {
            out.push('{');
            i += 2;
        } else if template[i..].starts_with("}}") {
            out.push('}');
            i += 2;
        } else if bytes[i] == b'{' {
            let rest = &template[i + 1..];
            let close = rest.find('}');
            let name = close.map(|c| &rest[..c]);
            match name.and_then(|n| pairs.iter().find(|(k, _)| *k == n)) {
                Some((_, value)) => {
                    out.push_str(value);
                    i += 1 + name.unwrap().len() + 1;
                }
                None => {
                    out.push('{');
                    i += 1;
                }
            }
        } else {
            // advance one full UTF-8 character
            let ch = template[i..].chars().next().unwrap();
            out.push(ch);
            i += ch.len_utf8();
        }
    }
    out
}

/// Digest of a template text, recorded in run manifests so prompt drift is
/// auditable.
pub fn prompt_digest(template: &str) -> String {
    sha256_hex(template.as_bytes())
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_fill_replaces_all_occurrences() {
        let t = "a {x} b {x} c {y}";
        assert_eq!(fill(t, &[("x", "1"), ("y", "2")]), "a 1 b 1 c 2");
    }

    #[test]
    fn test_fill_leaves_literal_json_braces() {
        let t = "out: {\"k\": [{\"segment_id\": \"S1\"}]} and {value}";
        assert_eq!(
            fill(t, &[("value", "V")]),
            "out: {\"k\": [{\"segment_id\": \"S1\"}]} and V"
        );
    }

    #[test]
    fn test_brace_escaped_fill_unescapes_doubles() {
        let t = "{{\n  \"task_completed\": true\n}}\nTask: {task}";
        let filled = fill_brace_escaped(t, &[("task", "do it")]);
        assert_eq!(filled, "{\n  \"task_completed\": true\n}\nTask: do it");
    }

    #[test]
    fn test_brace_escaped_fill_passes_unknown_placeholders() {
        let t = "{unknown} stays, {known} goes";
        assert_eq!(
            fill_brace_escaped(t, &[("known", "X")]),
            "{unknown} stays, X goes"
        );
    }

    #[test]
    fn test_judge_template_renders_plain_json_example() {
        let filled = fill_brace_escaped(
            NEW_TASK_JUDGE_PROMPT,
            &[("underspec_prompt", "P"), ("formatted_responses", "R")],
        );
        assert!(filled.contains("## Task Given to Assistant\nP\n"));
        assert!(filled.contains("{\n    \"task_completed\": true/false,"));
        assert!(!filled.contains("{{"));
        assert!(!filled.contains("}}"));
    }

    #[test]
    fn test_severity_instructions_are_single_lines() {
        for strategy in RemovalStrategy::ALL {
            let text = severity_instruction(strategy);
            assert!(!text.contains('\n'), "{strategy}: {text:?}");
            assert!(!text.is_empty());
        }
        assert!(severity_instruction(RemovalStrategy::Delete).starts_with("Remove"));
        assert!(severity_instruction(RemovalStrategy::Vaguify).starts_with("Replace with vague"));
        assert!(
            severity_instruction(RemovalStrategy::Genericize).starts_with("Replace with generic")
        );
    }

    #[test]
    fn test_embedded_templates_expose_expected_anchors() {
        assert!(EXTRACTION_PROMPT.contains("use ONLY 0.0, 0.5, or 1.0"));
        assert!(GENERATION_PROMPT.contains("including ALL occurrences"));
        assert!(GENERATION_PROMPT.contains("{severity_instruction}"));
        assert!(NEW_TASK_JUDGE_PROMPT.contains("ALL trials reached the SAME"));
        assert!(FAILURE_JUDGE_PROMPT.contains("flag_compound_questions"));
        assert!(FAILURE_JUDGE_FORMAT.contains("\"flags\""));
        assert_eq!(prompt_digest(EXTRACTION_PROMPT).len(), 64);
    }
}
