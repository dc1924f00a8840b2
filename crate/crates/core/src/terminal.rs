//! Terminal states and their canonical string keys.
//!
//! Two trials count as reaching "the same outcome" exactly when their
//! canonical keys are equal, so every consumer (the classifier, divergence
//! counting, benchmark export) must go through [`canonical_terminal_key`]
//! rather than comparing floats or JSON directly.

use crate::{CoreError, TrialRecord};
use serde::{Deserialize, Serialize};

/// Decimal places used when canonicalizing scalar outcomes. Two scores that
/// agree to this precision are the same outcome.
pub const SCALAR_KEY_DECIMALS: usize = 4;

/// Outcome of a single checkpoint: a pass/fail flag or a scalar score,
/// whichever the source benchmark reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckpointOutcome {
    Pass(bool),
    Score(f64),
}

impl CheckpointOutcome {
    /// Credit earned in [0, 1]; booleans are 0 or 1, scalars their value.
    pub fn credit(&self) -> f64 {
        match self {
            CheckpointOutcome::Pass(true) => 1.0,
            CheckpointOutcome::Pass(false) => 0.0,
            CheckpointOutcome::Score(s) => *s,
        }
    }

    /// Whether this outcome is a complete pass.
    pub fn is_full_pass(&self) -> bool {
        match self {
            CheckpointOutcome::Pass(b) => *b,
            CheckpointOutcome::Score(s) => *s >= 1.0,
        }
    }

    fn canonical(&self) -> String {
        match self {
            CheckpointOutcome::Pass(true) => "1".to_string(),
            CheckpointOutcome::Pass(false) => "0".to_string(),
            CheckpointOutcome::Score(s) => {
                // normalize -0.0 so it keys identically to 0.0
                let s = if *s == 0.0 { 0.0 } else { *s };
                format!("{s:.prec$}", prec = SCALAR_KEY_DECIMALS)
            }
        }
    }
}

/// Ordered tuple of checkpoint outcomes at task completion. Serializes as a
/// bare JSON array, e.g. `[true, false]` or `[0.5, 1.0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TerminalState(Vec<CheckpointOutcome>);

impl TerminalState {
    pub fn new(outcomes: Vec<CheckpointOutcome>) -> Self {
        TerminalState(outcomes)
    }

    pub fn outcomes(&self) -> &[CheckpointOutcome] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

/// Canonical equality key for a terminal state.
///
/// Booleans render as `1`/`0`, scalars with [`SCALAR_KEY_DECIMALS`] fixed
/// decimal places, joined with `|`. A pure function of the state: equal keys
/// define outcome equality everywhere in the pipeline.
pub fn canonical_terminal_key(state: &TerminalState) -> String {
    let parts: Vec<String> = state.0.iter().map(CheckpointOutcome::canonical).collect();
    parts.join("|")
}

/// Distinct terminal states across a set of trials, in first-occurrence
/// order, with their canonical keys.
///
/// Errors if the trials carry states of different arity; comparing tuples of
/// unequal length is a programming error, not a data condition.
pub fn unique_terminal_states(
    trials: &[TrialRecord],
) -> Result<Vec<(String, TerminalState)>, CoreError> {
    let mut seen: Vec<(String, TerminalState)> = Vec::new();
    let mut arity: Option<usize> = None;
    for t in trials {
        let a = t.terminal_state.arity();
        match arity {
            None => arity = Some(a),
            Some(prev) if prev != a => {
                return Err(CoreError::ContractViolation(format!(
                    "mixed terminal-state arity across trials: {prev} vs {a}"
                )))
            }
            _ => {}
        }
        let key = canonical_terminal_key(&t.terminal_state);
        if !seen.iter().any(|(k, _)| *k == key) {
            seen.push((key, t.terminal_state.clone()));
        }
    }
    Ok(seen)
}

// --- tuple-list rendering -------------------------------------------------
//
// Benchmark documents store the observed unique states as a compact string,
// e.g. "[(1, 1)]" or "[(1, 0), (0, 1)]". Rendering uses canonical element
// form; parsing accepts what rendering produces.

pub fn render_terminal_states(states: &[TerminalState]) -> String {
    let tuples: Vec<String> = states
        .iter()
        .map(|s| {
            let elems: Vec<String> = s.0.iter().map(CheckpointOutcome::canonical).collect();
            format!("({})", elems.join(", "))
        })
        .collect();
    format!("[{}]", tuples.join(", "))
}

pub fn parse_terminal_states(input: &str) -> Result<Vec<TerminalState>, CoreError> {
    let malformed = |reason: &str| CoreError::MalformedTerminalStates {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let body = input
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| malformed("missing enclosing brackets"))?
        .trim();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    let mut states = Vec::new();
    // tuples contain no nested parens, so ')' is an unambiguous terminator
    for piece in body.split(')') {
        let piece = piece.trim().trim_start_matches(',').trim();
        if piece.is_empty() {
            continue;
        }
        let inner = piece
            .strip_prefix('(')
            .ok_or_else(|| malformed("tuple missing parentheses"))?;
        let mut outcomes = Vec::new();
        for elem in inner.split(',') {
            let elem = elem.trim();
            if elem.is_empty() {
                continue; // tolerate a trailing comma
            }
            let outcome = match elem {
                "1" => CheckpointOutcome::Pass(true),
                "0" => CheckpointOutcome::Pass(false),
                other => CheckpointOutcome::Score(
                    other
                        .parse::<f64>()
                        .map_err(|_| malformed(&format!("bad element {other:?}")))?,
                ),
            };
            outcomes.push(outcome);
        }
        if outcomes.is_empty() {
            return Err(malformed("empty tuple"));
        }
        states.push(TerminalState::new(outcomes));
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bools(bits: &[bool]) -> TerminalState {
        TerminalState::new(bits.iter().map(|b| CheckpointOutcome::Pass(*b)).collect())
    }

    #[test]
    fn test_canonical_key_booleans() {
        assert_eq!(canonical_terminal_key(&bools(&[true, false])), "1|0");
        assert_eq!(canonical_terminal_key(&bools(&[true, true])), "1|1");
    }

    #[test]
    fn test_canonical_key_scalars_fixed_precision() {
        let s = TerminalState::new(vec![
            CheckpointOutcome::Score(0.5),
            CheckpointOutcome::Score(1.0),
        ]);
        assert_eq!(canonical_terminal_key(&s), "0.5000|1.0000");
        // values equal at 4 decimals collapse to one key
        let t = TerminalState::new(vec![
            CheckpointOutcome::Score(0.50000004),
            CheckpointOutcome::Score(1.0),
        ]);
        assert_eq!(canonical_terminal_key(&s), canonical_terminal_key(&t));
        // negative zero keys like zero
        let z = TerminalState::new(vec![CheckpointOutcome::Score(-0.0)]);
        assert_eq!(canonical_terminal_key(&z), "0.0000");
    }

    #[test]
    fn test_bool_and_scalar_keys_do_not_collide() {
        let b = TerminalState::new(vec![CheckpointOutcome::Pass(true)]);
        let s = TerminalState::new(vec![CheckpointOutcome::Score(1.0)]);
        assert_ne!(canonical_terminal_key(&b), canonical_terminal_key(&s));
    }

    #[test]
    fn test_serde_is_bare_array() {
        let s = bools(&[true, false]);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[true,false]");
        let back: TerminalState = serde_json::from_str("[0.5,1.0]").unwrap();
        assert_eq!(back.outcomes().len(), 2);
    }

    #[test]
    fn test_render_parse_round_trip() {
        let states = vec![bools(&[true, true])];
        let rendered = render_terminal_states(&states);
        assert_eq!(rendered, "[(1, 1)]");
        assert_eq!(parse_terminal_states(&rendered).unwrap(), states);

        let states = vec![bools(&[true, false]), bools(&[false, true])];
        let rendered = render_terminal_states(&states);
        assert_eq!(rendered, "[(1, 0), (0, 1)]");
        assert_eq!(parse_terminal_states(&rendered).unwrap(), states);

        let scalar = vec![TerminalState::new(vec![CheckpointOutcome::Score(0.5)])];
        let rendered = render_terminal_states(&scalar);
        assert_eq!(rendered, "[(0.5000)]");
        assert_eq!(parse_terminal_states(&rendered).unwrap(), scalar);
    }

    #[test]
    fn test_parse_rejects_garbage() {
        assert!(parse_terminal_states("(1, 1)").is_err());
        assert!(parse_terminal_states("[(1, x)]").is_err());
        assert!(parse_terminal_states("[()]").is_err());
        assert_eq!(parse_terminal_states("[]").unwrap(), Vec::<TerminalState>::new());
    }
}
