//! The `underspec` command line: run configs, the pipeline orchestrator,
//! per-stage subcommand bodies, and the self-contained offline demo.

pub mod config;
pub mod demo;
pub mod ops;
pub mod orchestrator;
