//! User simulator: a scoped stand-in for the human who wrote the original,
//! fully specified task.
//!
//! Each session is opened with the original prompt, the underspecified
//! prompt an agent actually received, and the withheld values. When the
//! agent asks a clarifying question, a model answers *as that user*: it
//! hands over exact withheld details and (under the strict policy) refuses
//! to invent anything beyond them. Sessions are isolated and transcripted.
//!
//! The service fronts two transports: a small HTTP API for harness-driven
//! trials, and an MCP stdio binding exposing `ask_user` as a tool.

pub mod http;
pub mod mcp;
pub mod persona;
pub mod policy;
pub mod session;

pub use persona::Persona;
pub use policy::SimulatorPolicy;
pub use session::{
    ask_request, session_id, Exchange, SessionInputs, SessionRegistry, SimulatorConfig,
    SimulatorError, SimulatorService,
};
