//! Domain types shared across the underspecification pipeline.
//!
//! Everything downstream (extraction, generation, the trial harness, the
//! classifier, metrics, the benchmark builder) communicates through the types
//! in this crate. The crate itself performs no I/O and talks to no model
//! provider; it is plain data plus the handful of pure functions whose
//! results every other crate must agree on (priority scoring, terminal-state
//! canonicalization, success rules).

mod error;
mod score;
mod segment;
mod task;
mod taxonomy;
mod terminal;
mod trial;
mod variant;
mod verdict;

pub use error::CoreError;
pub use score::{priority_score, Level3Score};
pub use segment::{value_occurrences, Grounding, Segment};
pub use task::{
    Checkpoint, CheckpointKind, GroundingData, OutcomeDomain, SuccessRule, TaskRecord,
};
pub use taxonomy::{Dimension, Subdimension};
pub use terminal::{
    canonical_terminal_key, parse_terminal_states, render_terminal_states, unique_terminal_states,
    CheckpointOutcome, TerminalState,
};
pub use trial::{TrialRecord, TrialStatus, UserCall};
pub use variant::{ExpectedQuestions, RemovalStrategy, UnderspecifiedVariant};
pub use verdict::{AmbiguityClass, AmbiguityVerdict, JudgeResult};
