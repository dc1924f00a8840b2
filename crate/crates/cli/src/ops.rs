//! Bodies of the standalone subcommands: each pipeline stage runnable on its
//! own files, plus the failure judge, the scripted mock agent server, and
//! small loading helpers shared with the orchestrator.

use std::collections::BTreeMap;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use underspec_core::{
    render_terminal_states, unique_terminal_states, AmbiguityClass, GroundingData,
    RemovalStrategy, Segment, TaskRecord, TrialRecord,
};
use underspec_gateway::{FixtureStore, Gateway, LiveProvider, Provider, ProviderMode, RecordProvider, ReplayProvider};
use underspec_harness::mock::MockScript;
use underspec_harness::{run_trials, AgentAdapter, MockAgent, TrialPlan, UserToolBinding};
use underspec_metrics::VariantOutcome;
use underspec_pipeline::builder::VerdictedVariant;
use underspec_pipeline::classifier::{classify, JudgeConfig, LlmNewTaskJudge};
use underspec_pipeline::extraction::{extract_segments, rank_segments, ExtractionConfig};
use underspec_pipeline::failure::{
    aggregate_categories, failure_rate_table, judge_trajectory, render_failure_table,
    FailureGroupKey, FailureJudgeConfig, FailureProfile,
};
use underspec_pipeline::generation::{
    enumerate_candidates, generate_variant, GenerationConfig, Phase2Document,
};
use underspec_simulator::{Persona, SimulatorConfig, SimulatorPolicy, SimulatorService};

use crate::config::{resolve, AdapterConfig, RunConfig};
use crate::orchestrator::{self, read_json, write_json};

// --- provider plumbing --------------------------------------------------------

/// Provider selection shared by the stage subcommands. Credentials are never
/// flags; live mode reads them from the environment.
#[derive(Debug, Clone)]
pub struct ProviderOptions {
    pub mode: ProviderMode,
    pub fixtures: Option<PathBuf>,
    pub max_output_tokens: Option<u32>,
}

impl ProviderOptions {
    pub fn gateway(&self) -> Result<Gateway> {
        let store = || -> Result<FixtureStore> {
            let dir = self
                .fixtures
                .as_ref()
                .ok_or_else(|| anyhow!("{:?} mode needs --fixtures", self.mode))?;
            Ok(FixtureStore::new(dir))
        };
        let provider: Box<dyn Provider> = match self.mode {
            ProviderMode::Live => Box::new(LiveProvider::from_env()?),
            ProviderMode::Replay => Box::new(ReplayProvider::new(store()?)),
            ProviderMode::Record => {
                Box::new(RecordProvider::new(Box::new(LiveProvider::from_env()?), store()?))
            }
        };
        Ok(Gateway::new(provider))
    }
}

pub fn parse_mode(s: &str) -> Result<ProviderMode> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| anyhow!("unknown provider mode {s:?}; use live, record, or replay"))
}

pub fn parse_strategy(s: &str) -> Result<RemovalStrategy> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| anyhow!("unknown strategy {s:?}; use delete, vaguify, or genericize"))
}

// --- file loading ---------------------------------------------------------------

/// A task file holds either one task document or an array of them.
pub fn load_tasks(path: &Path) -> Result<Vec<TaskRecord>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    if let Ok(one) = serde_json::from_str::<TaskRecord>(&text) {
        return Ok(vec![one]);
    }
    serde_json::from_str::<Vec<TaskRecord>>(&text)
        .with_context(|| format!("{} is neither a task nor a task array", path.display()))
}

/// Single task for the per-stage commands; `task_id` picks one out of a
/// multi-task file.
pub fn load_single_task(path: &Path, task_id: Option<&str>) -> Result<TaskRecord> {
    let tasks = load_tasks(path)?;
    match task_id {
        Some(id) => tasks
            .into_iter()
            .find(|t| t.task_id == id)
            .ok_or_else(|| anyhow!("no task {id:?} in {}", path.display())),
        None => {
            if tasks.len() != 1 {
                bail!(
                    "{} holds {} tasks; pass --task-id to pick one",
                    path.display(),
                    tasks.len()
                );
            }
            Ok(tasks.into_iter().next().expect("length checked"))
        }
    }
}

/// All trial files for one variant, ordered by trial index.
pub fn load_trials_for(trials_dir: &Path, variant_id: &str) -> Result<Vec<TrialRecord>> {
    let dir = trials_dir.join(variant_id);
    let entries = fs::read_dir(&dir)
        .with_context(|| format!("no trial directory {}", dir.display()))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    let mut records: Vec<TrialRecord> = paths
        .iter()
        .map(|p| read_json(p))
        .collect::<Result<_>>()?;
    records.sort_by_key(|t| t.trial_index);
    if records.is_empty() {
        bail!("no trial records under {}", dir.display());
    }
    Ok(records)
}

fn load_variants(path: &Path) -> Result<Vec<(Phase2Document, underspec_core::UnderspecifiedVariant)>> {
    let docs: Vec<Phase2Document> = read_json(path)?;
    docs.into_iter()
        .map(|d| {
            let v = d.to_variant()?;
            Ok((d, v))
        })
        .collect()
}

// --- stage commands ---------------------------------------------------------------

/// `extract`: one task in, ranked segments out. `grounding` optionally
/// attaches trajectory/checkpoint notes before extraction.
pub fn extract_cmd(
    task_file: &Path,
    task_id: Option<&str>,
    grounding: Option<&Path>,
    model: &str,
    provider: &ProviderOptions,
    out: &Path,
) -> Result<usize> {
    let mut task = load_single_task(task_file, task_id)?;
    if let Some(path) = grounding {
        let data: GroundingData = read_json(path)?;
        task.grounding_data = Some(data);
    }
    let gateway = provider.gateway()?;
    let config = ExtractionConfig {
        max_output_tokens: provider.max_output_tokens,
        ..ExtractionConfig::new(model)
    };
    let segments = rank_segments(&extract_segments(&task, &gateway, &config)?);
    write_json(out, &segments)?;
    Ok(segments.len())
}

/// `generate`: task + segments in, Phase-2 variant documents out.
#[allow(clippy::too_many_arguments)]
pub fn generate_cmd(
    task_file: &Path,
    task_id: Option<&str>,
    segments_file: &Path,
    strategy: RemovalStrategy,
    max_segments: usize,
    min_priority: f64,
    model: &str,
    provider: &ProviderOptions,
    out: &Path,
) -> Result<usize> {
    let task = load_single_task(task_file, task_id)?;
    let segments: Vec<Segment> = read_json(segments_file)?;
    let ranked = rank_segments(&segments);
    let gateway = provider.gateway()?;
    let config = GenerationConfig {
        max_output_tokens: provider.max_output_tokens,
        ..GenerationConfig::new(model)
    };
    let mut docs = Vec::new();
    for subset in enumerate_candidates(&ranked, max_segments, min_priority) {
        let variant = generate_variant(&task, &subset, strategy, &gateway, &config)?;
        docs.push(Phase2Document::from_variant(&variant));
    }
    if docs.is_empty() {
        bail!("no segment subset clears min_priority {min_priority}");
    }
    write_json(out, &docs)?;
    Ok(docs.len())
}

/// Settings for the standalone `trials` command.
#[derive(Debug, Clone)]
pub struct TrialsOptions {
    pub n: u64,
    pub parallelism: usize,
    pub with_user: bool,
    pub persona: Option<String>,
    pub timeout_seconds: u64,
    pub policy: String,
    pub simulator_model: String,
}

/// `trials`: runs every variant in the file against the adapter, one record
/// file per trial under `out_dir/<variant_id>/`. Returns trial count.
pub fn trials_cmd(
    task_file: &Path,
    variants_file: &Path,
    adapter_file: &Path,
    out_dir: &Path,
    options: &TrialsOptions,
    provider: &ProviderOptions,
) -> Result<usize> {
    let tasks = load_tasks(task_file)?;
    let tasks_by_id: BTreeMap<String, TaskRecord> =
        tasks.into_iter().map(|t| (t.task_id.clone(), t)).collect();
    let variants = load_variants(variants_file)?;
    let adapter_config: AdapterConfig = read_json(adapter_file)?;
    let adapter_base = adapter_file
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));

    let server = if options.with_user {
        let policy = SimulatorPolicy::parse(&options.policy)
            .ok_or_else(|| anyhow!("unknown simulator policy {:?}", options.policy))?;
        let sim_config = SimulatorConfig {
            model_id: options.simulator_model.clone(),
            policy,
            max_output_tokens: provider.max_output_tokens,
        };
        let service = Arc::new(SimulatorService::new(provider.gateway()?, sim_config));
        Some(underspec_simulator::http::serve(
            service,
            "127.0.0.1:0".parse().expect("loopback addr"),
        )?)
    } else {
        None
    };
    let binding = server.as_ref().map(|s| UserToolBinding {
        base_url: s.base_url(),
    });

    let persona_suffix = match options.persona.as_deref() {
        Some(name) => Some(
            Persona::parse(name)
                .ok_or_else(|| anyhow!("unknown persona {name:?}"))?
                .suffix()
                .to_string(),
        ),
        None => None,
    };
    let plan = TrialPlan {
        n_trials: options.n,
        parallelism: options.parallelism,
        timeout_seconds: options.timeout_seconds,
        system_prompt_override: None,
        persona_suffix,
    };

    let mut written = 0;
    for (_, variant) in &variants {
        let task = tasks_by_id.get(&variant.parent_task_id).ok_or_else(|| {
            anyhow!("variant {} has no task {} in the task file", variant.variant_id, variant.parent_task_id)
        })?;
        let adapter = orchestrator::build_adapter(
            &adapter_config,
            &adapter_base,
            &task.task_id,
            &variant.variant_id,
        )?;
        let records = run_trials(task, variant, adapter.as_ref(), binding.as_ref(), &plan)?;
        for record in &records {
            write_json(
                &out_dir.join(format!("{}/trial_{:03}.json", variant.variant_id, record.trial_index)),
                record,
            )?;
            written += 1;
        }
    }
    if let Some(server) = server {
        server.stop();
    }
    Ok(written)
}

/// `classify`: variants + a trials directory in, verdict documents out.
/// Returns the class tally.
pub fn classify_cmd(
    variants_file: &Path,
    trials_dir: &Path,
    model: &str,
    provider: &ProviderOptions,
    out: &Path,
) -> Result<BTreeMap<AmbiguityClass, usize>> {
    let variants = load_variants(variants_file)?;
    let gateway = provider.gateway()?;
    let judge_config = JudgeConfig {
        max_output_tokens: provider.max_output_tokens,
        ..JudgeConfig::new(model)
    };
    let judge = LlmNewTaskJudge::new(&gateway, judge_config);

    let mut verdicts = Vec::new();
    let mut tally: BTreeMap<AmbiguityClass, usize> = BTreeMap::new();
    for (_, variant) in &variants {
        let records = load_trials_for(trials_dir, &variant.variant_id)?;
        let verdict = classify(&records, &variant.underspecified_prompt, &judge)?;
        *tally.entry(verdict.class).or_insert(0) += 1;
        let states: Vec<_> = unique_terminal_states(&records)?
            .into_iter()
            .map(|(_, s)| s)
            .collect();
        verdicts.push(VerdictedVariant {
            variant: variant.clone(),
            verdict,
            terminal_states: render_terminal_states(&states),
        });
    }
    write_json(out, &verdicts)?;
    Ok(tally)
}

/// `build`: merges verdict files, drops new-task variants, samples every
/// dataset to the target distribution, writes one benchmark per dataset
/// plus the summary. Returns the benchmark file names.
pub fn build_cmd(
    verdicts_files: &[PathBuf],
    tasks_files: &[PathBuf],
    targets: &BTreeMap<AmbiguityClass, usize>,
    seed: u64,
    out_dir: &Path,
) -> Result<Vec<String>> {
    let mut verdicts: Vec<VerdictedVariant> = Vec::new();
    for path in verdicts_files {
        verdicts.extend(read_json::<Vec<VerdictedVariant>>(path)?);
    }
    let mut tasks_by_id = BTreeMap::new();
    for path in tasks_files {
        for task in load_tasks(path)? {
            tasks_by_id.insert(task.task_id.clone(), task);
        }
    }
    let (files, summary) = orchestrator::build_benchmarks(&verdicts, &tasks_by_id, targets, seed)?;
    fs::create_dir_all(out_dir)?;
    let mut names = Vec::new();
    for (name, text) in files {
        fs::write(out_dir.join(&name), text)?;
        names.push(name);
    }
    write_json(&out_dir.join("building_summary.json"), &summary)?;
    Ok(names)
}

/// `report`: verdict documents plus their trial directory in, grouped
/// metric tables out. `baseline_trials_dir` holds a paired run of the same
/// variants (typically without the user tool) and fills the gain columns.
#[allow(clippy::too_many_arguments)]
pub fn report_cmd(
    verdicts_file: &Path,
    trials_dir: &Path,
    tasks_files: &[PathBuf],
    baseline_trials_dir: Option<&Path>,
    out_dir: &Path,
    group_by: &[String],
    k: u64,
    plots: bool,
    persona: Option<String>,
) -> Result<Vec<String>> {
    let verdicts: Vec<VerdictedVariant> = read_json(verdicts_file)?;
    let mut tasks_by_id = BTreeMap::new();
    for path in tasks_files {
        for task in load_tasks(path)? {
            tasks_by_id.insert(task.task_id.clone(), task);
        }
    }
    let variants: Vec<_> = verdicts.iter().map(|v| v.variant.clone()).collect();

    let outcomes_from = |dir: &Path| -> Result<Vec<VariantOutcome>> {
        let mut trials = BTreeMap::new();
        for v in &variants {
            trials.insert(v.variant_id.clone(), load_trials_for(dir, &v.variant_id)?);
        }
        orchestrator::variant_outcomes(persona.clone(), &variants, &trials, &verdicts, &tasks_by_id)
    };

    let outcomes = outcomes_from(trials_dir)?;
    let baseline = baseline_trials_dir.map(outcomes_from).transpose()?;
    fs::create_dir_all(out_dir)?;
    orchestrator::write_reports(out_dir, &outcomes, baseline.as_deref(), group_by, k, plots)
}

// --- failure judging -----------------------------------------------------------

/// `judge-failures`: judges every trial in the run that asked at least one
/// question, writing a flags file per trial and the category-rate table.
/// Runs over the artifacts of a completed `run` for the same config.
pub fn judge_failures(
    config: &RunConfig,
    base: &Path,
    oracle: Option<&dyn Fn() -> Box<dyn Provider>>,
) -> Result<usize> {
    config.validate()?;
    let out = resolve(base, &config.out_dir);
    let variants = load_variants(&out.join("variants.json"))
        .context("judge-failures needs a completed run (variants.json missing)")?;

    let mut tasks_by_id: BTreeMap<String, TaskRecord> = BTreeMap::new();
    for ds in &config.datasets {
        for task in load_tasks(&resolve(base, &ds.tasks_file))? {
            tasks_by_id.insert(task.task_id.clone(), task);
        }
    }

    let gateway = orchestrator::build_gateway(config, base, oracle)?;
    let judge_config = FailureJudgeConfig {
        model_id: config.provider.judge_model.clone(),
        max_output_tokens: config.provider.max_output_tokens,
    };

    let mut profiles = Vec::new();
    for (_, variant) in &variants {
        let records = load_trials_for(&out.join("trials"), &variant.variant_id)?;
        for trial in records.iter().filter(|t| !t.user_calls.is_empty()) {
            let flags = judge_trajectory(&gateway, trial, variant, &judge_config)?;
            let profile = FailureProfile {
                variant_id: variant.variant_id.clone(),
                trial_index: trial.trial_index,
                dataset: tasks_by_id
                    .get(&variant.parent_task_id)
                    .map(|t| t.dataset_id.clone())
                    .unwrap_or_default(),
                agent_config_id: trial.agent_config_id.clone(),
                success: trial.success,
                categories: aggregate_categories(&flags),
            };
            write_json(
                &out.join(format!("failure/{}_trial{}.json", variant.variant_id, trial.trial_index)),
                &serde_json::json!({ "profile": profile, "flags": flags }),
            )?;
            profiles.push(profile);
        }
    }

    let rows = failure_rate_table(&profiles, FailureGroupKey::Overall, false);
    fs::write(out.join("failure_rates.txt"), render_failure_table(&rows))?;
    write_json(&out.join("failure_rates.json"), &rows)?;
    Ok(profiles.len())
}

// --- mock agent over HTTP ---------------------------------------------------------

/// `mock-agent serve`: answers adapter requests over HTTP from a script,
/// the wire twin of `mock-agent run`. Blocks forever.
pub fn serve_mock(script: MockScript, addr: SocketAddr) -> Result<()> {
    use axum::{extract::State, routing::post, Json, Router};

    async fn handle(
        State(script): State<Arc<MockScript>>,
        Json(request): Json<underspec_harness::adapter::AdapterRequest>,
    ) -> Result<Json<underspec_harness::adapter::AdapterResponse>, (axum::http::StatusCode, String)>
    {
        // the mock talks to the user tool with a blocking client; keep it off
        // the async worker
        let result = tokio::task::spawn_blocking(move || MockAgent::new((*script).clone()).run(&request))
            .await
            .map_err(|e| (axum::http::StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
        result
            .map(Json)
            .map_err(|e| (axum::http::StatusCode::BAD_REQUEST, e.to_string()))
    }

    let script = Arc::new(script);
    let app = Router::new()
        .route("/", post(handle))
        .with_state(script);

    let runtime = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        eprintln!("mock agent listening on http://{}", listener.local_addr()?);
        axum::serve(listener, app).await
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_parse_mode_and_strategy() {
        assert_eq!(parse_mode("replay").unwrap(), ProviderMode::Replay);
        assert!(parse_mode("offline").is_err());
        assert_eq!(parse_strategy("vaguify").unwrap(), RemovalStrategy::Vaguify);
        assert!(parse_strategy("erase").is_err());
    }

    #[test]
    fn test_load_tasks_accepts_single_doc_and_array() {
        let dir = std::env::temp_dir().join(format!("underspec-ops-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let task = serde_json::json!({
            "task_id": "t1",
            "dataset_id": "d",
            "prompt": "do the thing",
            "checkpoint_spec": [{"id": "c1"}],
            "success_rule": {"kind": "all_pass"},
        });
        let single = dir.join("one.json");
        fs::write(&single, task.to_string()).unwrap();
        assert_eq!(load_tasks(&single).unwrap().len(), 1);
        assert_eq!(load_single_task(&single, None).unwrap().task_id, "t1");

        let many = dir.join("many.json");
        fs::write(&many, serde_json::json!([task, {"task_id": "t2", "dataset_id": "d", "prompt": "other", "checkpoint_spec": [{"id": "c1"}], "success_rule": {"kind": "all_pass"}}]).to_string()).unwrap();
        assert_eq!(load_tasks(&many).unwrap().len(), 2);
        assert!(load_single_task(&many, None).is_err(), "ambiguous without --task-id");
        assert_eq!(load_single_task(&many, Some("t2")).unwrap().task_id, "t2");

        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn test_provider_options_reject_fixtureless_replay() {
        let opts = ProviderOptions {
            mode: ProviderMode::Replay,
            fixtures: None,
            max_output_tokens: None,
        };
        assert!(opts.gateway().is_err());
    }
}
