//! Trial harness: drives agent adapters over underspecified variants and
//! records trial outcomes.

pub mod adapter;
pub mod mock;
pub mod runner;

pub use adapter::{
    AdapterError, AdapterRequest, AdapterResponse, AgentAdapter, HttpAdapter, SubprocessAdapter,
};
pub use mock::{MockAgent, MockScript};
pub use runner::{run_trials, HarnessError, TrialPlan, UserToolBinding};
