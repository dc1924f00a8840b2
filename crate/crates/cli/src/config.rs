//! Run configuration. One JSON document describes a whole pipeline run:
//! where the tasks live, how to reach a model, which agent to drive, and
//! what the benchmark should look like at the end.
//!
//! ```json
//! {
//!   "run_name": "demo",
//!   "out_dir": "run",
//!   "seed": 7,
//!   "k": 1,
//!   "datasets": [{ "dataset_id": "demo", "tasks_file": "tasks.json" }],
//!   "provider": {
//!     "mode": "replay",
//!     "fixtures_dir": "fixtures",
//!     "extraction_model": "extractor-v1",
//!     "generation_model": "generator-v1",
//!     "judge_model": "judge-v1",
//!     "simulator_model": "simulator-v1"
//!   },
//!   "generation": { "strategy": "delete", "max_segments": 1, "min_priority": 0.5 },
//!   "adapter": {
//!     "kind": "subprocess",
//!     "id": "scripted-mock",
//!     "program": "{self}",
//!     "args": ["mock-agent", "run", "--script", "scripts/{variant_id}.json"]
//!   },
//!   "trials": { "n": 3, "parallelism": 2, "with_user": true, "timeout_seconds": 60 },
//!   "targets": { "outcome-critical": 2, "divergent": 2, "benign": 2 },
//!   "report": { "group_by": ["overall", "ambiguity_class"], "plots": true }
//! }
//! ```
//!
//! Relative paths resolve against the directory holding the config file.
//! Credentials never appear here; live mode reads them from the
//! environment (`UNDERSPEC_LLM_ENDPOINT`, `UNDERSPEC_LLM_API_KEY`).
//!
//! Adapter `program` and `args` entries may contain the placeholders
//! `{self}` (this executable), `{task_id}`, and `{variant_id}`, substituted
//! per variant before the agent is launched.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use underspec_core::{AmbiguityClass, RemovalStrategy};
use underspec_gateway::ProviderMode;
use underspec_metrics::GroupKey;
use underspec_simulator::{Persona, SimulatorPolicy};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub run_name: String,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
    pub seed: u64,
    #[serde(default = "default_k")]
    pub k: u64,
    pub datasets: Vec<DatasetConfig>,
    pub provider: ProviderConfig,
    #[serde(default)]
    pub generation: GenerationSettings,
    pub adapter: AdapterConfig,
    #[serde(default)]
    pub trials: TrialSettings,
    pub targets: BTreeMap<AmbiguityClass, usize>,
    #[serde(default)]
    pub report: ReportSettings,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub dataset_id: String,
    pub tasks_file: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub mode: ProviderMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixtures_dir: Option<String>,
    pub extraction_model: String,
    pub generation_model: String,
    pub judge_model: String,
    pub simulator_model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_output_tokens: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationSettings {
    #[serde(default = "default_strategy")]
    pub strategy: RemovalStrategy,
    #[serde(default = "default_max_segments")]
    pub max_segments: usize,
    #[serde(default = "default_min_priority")]
    pub min_priority: f64,
}

impl Default for GenerationSettings {
    fn default() -> Self {
        GenerationSettings {
            strategy: default_strategy(),
            max_segments: default_max_segments(),
            min_priority: default_min_priority(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdapterConfig {
    Subprocess {
        id: String,
        program: String,
        #[serde(default)]
        args: Vec<String>,
    },
    Http {
        id: String,
        endpoint: String,
    },
}

impl AdapterConfig {
    pub fn id(&self) -> &str {
        match self {
            AdapterConfig::Subprocess { id, .. } => id,
            AdapterConfig::Http { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialSettings {
    #[serde(default = "default_n_trials")]
    pub n: u64,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default)]
    pub with_user: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persona: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_seconds: u64,
    #[serde(default = "default_policy")]
    pub simulator_policy: String,
}

impl Default for TrialSettings {
    fn default() -> Self {
        TrialSettings {
            n: default_n_trials(),
            parallelism: default_parallelism(),
            with_user: false,
            persona: None,
            timeout_seconds: default_timeout(),
            simulator_policy: default_policy(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportSettings {
    #[serde(default = "default_group_by")]
    pub group_by: Vec<String>,
    #[serde(default)]
    pub plots: bool,
}

impl Default for ReportSettings {
    fn default() -> Self {
        ReportSettings {
            group_by: default_group_by(),
            plots: false,
        }
    }
}

fn default_out_dir() -> String {
    "run".to_string()
}
fn default_k() -> u64 {
    1
}
fn default_strategy() -> RemovalStrategy {
    RemovalStrategy::Delete
}
fn default_max_segments() -> usize {
    1
}
fn default_min_priority() -> f64 {
    0.5
}
fn default_n_trials() -> u64 {
    3
}
fn default_parallelism() -> usize {
    1
}
fn default_timeout() -> u64 {
    1800
}
fn default_policy() -> String {
    "standard".to_string()
}
fn default_group_by() -> Vec<String> {
    vec!["overall".to_string()]
}

impl RunConfig {
    /// Loads a config and returns it with the directory its relative paths
    /// resolve against.
    pub fn load(path: &Path) -> Result<(RunConfig, PathBuf)> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("config {} is malformed", path.display()))?;
        config.validate()?;
        let base = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((config, base))
    }

    pub fn validate(&self) -> Result<()> {
        if self.run_name.is_empty() {
            bail!("run_name must not be empty");
        }
        if self.datasets.is_empty() {
            bail!("at least one dataset is required");
        }
        if self.trials.n == 0 {
            bail!("trials.n must be at least 1");
        }
        if self.k == 0 || self.k > self.trials.n {
            bail!("k must satisfy 1 <= k <= trials.n");
        }
        if self.targets.contains_key(&AmbiguityClass::NewTask) {
            bail!("targets cannot include new-task; those variants are excluded, not sampled");
        }
        if matches!(self.provider.mode, ProviderMode::Replay | ProviderMode::Record)
            && self.provider.fixtures_dir.is_none()
        {
            bail!("provider.fixtures_dir is required in replay and record modes");
        }
        if let Some(p) = &self.trials.persona {
            if Persona::parse(p).is_none() {
                bail!("unknown persona {p:?}; expected supervisor, standard, or executive");
            }
        }
        if SimulatorPolicy::parse(&self.trials.simulator_policy).is_none() {
            bail!(
                "unknown simulator_policy {:?}; expected standard or strict",
                self.trials.simulator_policy
            );
        }
        for key in &self.report.group_by {
            if GroupKey::parse(key).is_none() {
                bail!("unknown report group key {key:?}");
            }
        }
        if !(0.0..=1.0).contains(&self.generation.min_priority) {
            bail!("generation.min_priority must lie in [0, 1]");
        }
        if self.generation.max_segments == 0 {
            bail!("generation.max_segments must be at least 1");
        }
        Ok(())
    }
}

/// Resolves a possibly-relative configured path against the config dir.
pub fn resolve(base: &Path, configured: &str) -> PathBuf {
    let p = Path::new(configured);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Parses the `--targets` shorthand, e.g. `oc:40,div:30,ben:30`.
pub fn parse_targets(text: &str) -> Result<BTreeMap<AmbiguityClass, usize>> {
    let mut targets = BTreeMap::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, count) = part
            .split_once(':')
            .with_context(|| format!("target {part:?} is not of the form class:count"))?;
        let class = match key.trim() {
            "oc" => AmbiguityClass::OutcomeCritical,
            "div" => AmbiguityClass::Divergent,
            "ben" => AmbiguityClass::Benign,
            other => bail!("unknown target class {other:?}; expected oc, div, or ben"),
        };
        let count: usize = count
            .trim()
            .parse()
            .with_context(|| format!("target count {count:?} is not a number"))?;
        if targets.insert(class, count).is_some() {
            bail!("target class {key:?} given twice");
        }
    }
    if targets.is_empty() {
        bail!("--targets must name at least one class");
    }
    Ok(targets)
}
