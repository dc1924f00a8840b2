//! The synthetic underspecification pipeline.
//!
//! Four stages live here, in dataflow order:
//!
//! 1. [`extraction`] turns a fully specified task prompt into scored,
//!    validated information segments.
//! 2. [`generation`] removes chosen segment subsets from the prompt under a
//!    removal strategy and post-validates the result.
//! 3. [`classifier`] maps a variant's empirical trial outcomes to an
//!    ambiguity class, consulting an LLM judge where outcomes alone cannot
//!    decide.
//! 4. [`builder`] filters base tasks by baseline competence, samples
//!    classified variants to a target class distribution, and exports the
//!    benchmark schema.
//!
//! [`failure`] sits to the side: an LLM-as-judge over trajectories that
//! asked clarifying questions, producing 21 diagnostic flags rolled up into
//! seven failure categories.
//!
//! All model exchanges go through [`underspec_gateway::Gateway`], so every
//! stage runs deterministically against recorded fixtures.

pub mod builder;
pub mod classifier;
pub mod extraction;
pub mod failure;
pub mod generation;
pub mod prompts;

mod error;

pub use error::PipelineError;
