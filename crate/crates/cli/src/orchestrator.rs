//! End-to-end pipeline driver.
//!
//! Phases run in a fixed order, each persisting its artifacts before the
//! next starts. The manifest written alongside them records config and
//! input digests, model ids, prompt-template digests, and per-phase status,
//! so a re-run skips anything already complete and a crashed run resumes
//! where it stopped. Replay-mode runs are deterministic: same config, same
//! fixtures, same bytes out.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use underspec_core::{
    render_terminal_states, unique_terminal_states, Segment, TaskRecord, TrialRecord,
    UnderspecifiedVariant,
};
use underspec_gateway::{
    sha256_hex, FixtureStore, Gateway, LiveProvider, Provider, ProviderMode, RecordProvider,
    ReplayProvider,
};
use underspec_harness::{
    run_trials, AgentAdapter, HttpAdapter, SubprocessAdapter, TrialPlan, UserToolBinding,
};
use underspec_metrics::{
    breakdown_report, render_table, to_plot_series, BreakdownReport, GroupKey, VariantOutcome,
};
use underspec_pipeline::builder::{
    export_benchmark, render_benchmark, sample_to_distribution, SampleResult, VerdictedVariant,
};
use underspec_pipeline::classifier::{classify, JudgeConfig, LlmNewTaskJudge};
use underspec_pipeline::extraction::{extract_segments, rank_segments, ExtractionConfig};
use underspec_pipeline::generation::{
    enumerate_candidates, generate_variant, GenerationConfig, Phase2Document,
};
use underspec_pipeline::prompts;
use underspec_simulator::{Persona, SimulatorConfig, SimulatorPolicy, SimulatorService};

use crate::config::{resolve, AdapterConfig, RunConfig};

pub const PHASE_NAMES: [&str; 6] = [
    "extraction",
    "generation",
    "trials",
    "classification",
    "building",
    "reporting",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub run_name: String,
    pub seed: u64,
    pub provider_mode: ProviderMode,
    pub config_digest: String,
    pub models: BTreeMap<String, String>,
    /// Template version -> content digest, for drift auditing.
    pub prompt_templates: BTreeMap<String, String>,
    /// Input label -> file digest.
    pub inputs: BTreeMap<String, String>,
    pub phases: Vec<PhaseEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseEntry {
    pub name: String,
    pub status: PhaseStatus,
    /// Paths relative to the run directory.
    #[serde(default)]
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum PhaseStatus {
    Pending,
    Complete,
    Failed { error: String },
}

impl Manifest {
    fn entry_mut(&mut self, name: &str) -> &mut PhaseEntry {
        self.phases
            .iter_mut()
            .find(|p| p.name == name)
            .expect("phase names are fixed")
    }

    pub fn entry(&self, name: &str) -> Option<&PhaseEntry> {
        self.phases.iter().find(|p| p.name == name)
    }

    /// Complete and with every artifact still on disk; deleting an artifact
    /// re-arms its phase.
    pub fn phase_done(&self, name: &str, out: &Path) -> bool {
        match self.entry(name) {
            Some(entry) => {
                entry.status == PhaseStatus::Complete
                    && !entry.artifacts.is_empty()
                    && entry.artifacts.iter().all(|a| out.join(a).exists())
            }
            None => false,
        }
    }
}

pub const MANIFEST_FILE: &str = "manifest.json";

fn write_manifest(manifest: &Manifest, out: &Path) -> Result<()> {
    write_json(&out.join(MANIFEST_FILE), manifest)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is malformed", path.display()))
}

// --- provider / gateway construction ----------------------------------------

/// Builds one provider per the config. `oracle` substitutes for the live
/// endpoint (used by the offline demo to record fixtures without a network).
fn build_provider(
    config: &RunConfig,
    base: &Path,
    oracle: Option<&dyn Fn() -> Box<dyn Provider>>,
) -> Result<Box<dyn Provider>> {
    let store = || -> Result<FixtureStore> {
        let dir = config
            .provider
            .fixtures_dir
            .as_ref()
            .ok_or_else(|| anyhow!("fixtures_dir missing"))?;
        Ok(FixtureStore::new(resolve(base, dir)))
    };
    let upstream = |oracle: Option<&dyn Fn() -> Box<dyn Provider>>| -> Result<Box<dyn Provider>> {
        match oracle {
            Some(factory) => Ok(factory()),
            None => Ok(Box::new(LiveProvider::from_env()?)),
        }
    };
    Ok(match config.provider.mode {
        ProviderMode::Live => upstream(oracle)?,
        ProviderMode::Replay => Box::new(ReplayProvider::new(store()?)),
        ProviderMode::Record => Box::new(RecordProvider::new(upstream(oracle)?, store()?)),
    })
}

pub(crate) fn build_gateway(
    config: &RunConfig,
    base: &Path,
    oracle: Option<&dyn Fn() -> Box<dyn Provider>>,
) -> Result<Gateway> {
    Ok(Gateway::new(build_provider(config, base, oracle)?))
}

// --- adapter construction ---------------------------------------------------

/// Expands `{self}`, `{base}`, `{task_id}`, and `{variant_id}`.
fn substitute(text: &str, base: &Path, task_id: &str, variant_id: &str) -> Result<String> {
    let mut out = text.to_string();
    if out.contains("{self}") {
        let exe = std::env::current_exe().context("cannot resolve {self} placeholder")?;
        out = out.replace("{self}", &exe.to_string_lossy());
    }
    Ok(out
        .replace("{base}", &base.to_string_lossy())
        .replace("{task_id}", task_id)
        .replace("{variant_id}", variant_id))
}

pub(crate) fn build_adapter(
    adapter: &AdapterConfig,
    base: &Path,
    task_id: &str,
    variant_id: &str,
) -> Result<Box<dyn AgentAdapter>> {
    Ok(match adapter {
        AdapterConfig::Subprocess { id, program, args } => {
            let program = substitute(program, base, task_id, variant_id)?;
            let args = args
                .iter()
                .map(|a| substitute(a, base, task_id, variant_id))
                .collect::<Result<Vec<_>>>()?;
            Box::new(SubprocessAdapter::new(id.clone(), program, args))
        }
        AdapterConfig::Http { id, endpoint } => {
            let endpoint = substitute(endpoint, base, task_id, variant_id)?;
            Box::new(HttpAdapter::new(id.clone(), endpoint))
        }
    })
}

// --- run state ---------------------------------------------------------------

struct LoadedDataset {
    tasks: Vec<TaskRecord>,
}

fn load_datasets(config: &RunConfig, base: &Path) -> Result<(Vec<LoadedDataset>, BTreeMap<String, String>)> {
    let mut datasets = Vec::new();
    let mut digests = BTreeMap::new();
    for ds in &config.datasets {
        let path = resolve(base, &ds.tasks_file);
        let bytes =
            fs::read(&path).with_context(|| format!("cannot read tasks {}", path.display()))?;
        digests.insert(format!("tasks:{}", ds.dataset_id), sha256_hex(&bytes));
        let tasks: Vec<TaskRecord> = serde_json::from_slice(&bytes)
            .with_context(|| format!("{} is malformed", path.display()))?;
        for task in &tasks {
            if task.dataset_id != ds.dataset_id {
                bail!(
                    "task {} declares dataset {:?} but is listed under {:?}",
                    task.task_id,
                    task.dataset_id,
                    ds.dataset_id
                );
            }
        }
        datasets.push(LoadedDataset { tasks });
    }
    Ok((datasets, digests))
}

fn template_digests(config: &RunConfig) -> BTreeMap<String, String> {
    use underspec_core::RemovalStrategy;
    let mut t = BTreeMap::new();
    let mut put = |version: &str, text: &str| {
        t.insert(version.to_string(), prompts::prompt_digest(text));
    };
    put(prompts::EXTRACTION_PROMPT_VERSION, prompts::EXTRACTION_PROMPT);
    put(prompts::GENERATION_PROMPT_VERSION, prompts::GENERATION_PROMPT);
    put(
        prompts::NEW_TASK_JUDGE_PROMPT_VERSION,
        prompts::NEW_TASK_JUDGE_PROMPT,
    );
    put(
        prompts::FAILURE_JUDGE_PROMPT_VERSION,
        prompts::FAILURE_JUDGE_PROMPT,
    );
    put(
        prompts::FAILURE_JUDGE_FORMAT_VERSION,
        prompts::FAILURE_JUDGE_FORMAT,
    );
    for strategy in [
        RemovalStrategy::Delete,
        RemovalStrategy::Vaguify,
        RemovalStrategy::Genericize,
    ] {
        put(
            &format!("severity_{strategy}_v1"),
            prompts::severity_instruction(strategy),
        );
    }
    put(
        underspec_simulator::policy::STANDARD_TEMPLATE_VERSION,
        underspec_simulator::policy::STANDARD_TEMPLATE,
    );
    put(
        underspec_simulator::policy::STRICT_TEMPLATE_VERSION,
        underspec_simulator::policy::STRICT_TEMPLATE,
    );
    put(
        underspec_harness::runner::AGENT_SUFFIX_VERSION,
        underspec_harness::runner::AGENT_SUFFIX,
    );
    if let Some(p) = config.trials.persona.as_deref().and_then(Persona::parse) {
        put(&format!("persona_{}_v1", p.as_str()), p.suffix());
    }
    t
}

fn init_manifest(config: &RunConfig, config_digest: String, inputs: BTreeMap<String, String>) -> Manifest {
    let mut models = BTreeMap::new();
    models.insert("extraction".into(), config.provider.extraction_model.clone());
    models.insert("generation".into(), config.provider.generation_model.clone());
    models.insert("judge".into(), config.provider.judge_model.clone());
    models.insert("simulator".into(), config.provider.simulator_model.clone());
    models.insert("agent".into(), config.adapter.id().to_string());
    Manifest {
        run_name: config.run_name.clone(),
        seed: config.seed,
        provider_mode: config.provider.mode,
        config_digest,
        models,
        prompt_templates: template_digests(config),
        inputs,
        phases: PHASE_NAMES
            .iter()
            .map(|name| PhaseEntry {
                name: name.to_string(),
                status: PhaseStatus::Pending,
                artifacts: Vec::new(),
            })
            .collect(),
    }
}

/// Config digest over the canonical JSON of the parsed config, so formatting
/// and key order in the file do not matter.
pub fn config_digest(config: &RunConfig) -> String {
    let value = serde_json::to_value(config).expect("config serializes");
    sha256_hex(serde_json::to_string(&value).expect("value serializes").as_bytes())
}

// --- phase plumbing ----------------------------------------------------------

fn run_phase<T>(
    manifest: &mut Manifest,
    out: &Path,
    name: &str,
    body: impl FnOnce() -> Result<(T, Vec<String>)>,
) -> Result<T> {
    log::info!("phase {name}: running");
    match body() {
        Ok((value, artifacts)) => {
            let entry = manifest.entry_mut(name);
            entry.status = PhaseStatus::Complete;
            entry.artifacts = artifacts;
            write_manifest(manifest, out)?;
            Ok(value)
        }
        Err(e) => {
            let entry = manifest.entry_mut(name);
            entry.status = PhaseStatus::Failed {
                error: format!("{e:#}"),
            };
            let _ = write_manifest(manifest, out);
            Err(e.context(format!("phase {name} failed")))
        }
    }
}

fn trial_file(variant_id: &str, index: u64) -> String {
    format!("trials/{variant_id}/trial_{index:03}.json")
}

// --- the pipeline ------------------------------------------------------------

pub fn run_pipeline(config: &RunConfig, base: &Path) -> Result<Manifest> {
    run_pipeline_with_oracle(config, base, None)
}

/// Full run. `oracle` should be `None` except when recording fixtures from a
/// deterministic stand-in provider.
pub fn run_pipeline_with_oracle(
    config: &RunConfig,
    base: &Path,
    oracle: Option<&dyn Fn() -> Box<dyn Provider>>,
) -> Result<Manifest> {
    config.validate()?;
    let out = resolve(base, &config.out_dir);
    fs::create_dir_all(&out)?;

    let digest = config_digest(config);
    let (datasets, input_digests) = load_datasets(config, base)?;

    let manifest_path = out.join(MANIFEST_FILE);
    let mut manifest = if manifest_path.exists() {
        let existing: Manifest = read_json(&manifest_path)?;
        if existing.config_digest != digest {
            bail!(
                "{} belongs to a different config (digest {} vs {}); use a fresh out_dir",
                manifest_path.display(),
                existing.config_digest,
                digest
            );
        }
        existing
    } else {
        init_manifest(config, digest, input_digests)
    };

    // fail before phase 1 if the provider cannot be built (e.g. live mode
    // without credentials)
    let gateway = build_gateway(config, base, oracle)?;

    let tasks_by_id: BTreeMap<String, TaskRecord> = datasets
        .iter()
        .flat_map(|d| d.tasks.iter().cloned())
        .map(|t| (t.task_id.clone(), t))
        .collect();

    // --- phase 1: extraction ---
    let segments: BTreeMap<String, Vec<Segment>> = if manifest.phase_done("extraction", &out) {
        log::info!("phase extraction: already complete, skipping");
        let mut map = BTreeMap::new();
        for entry in &manifest.entry("extraction").unwrap().artifacts {
            let segs: Vec<Segment> = read_json(&out.join(entry))?;
            let task_id = Path::new(entry)
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| anyhow!("bad segments artifact path {entry}"))?;
            map.insert(task_id.to_string(), segs);
        }
        map
    } else {
        run_phase(&mut manifest, &out, "extraction", || {
            let ex_config = ExtractionConfig {
                max_output_tokens: config.provider.max_output_tokens,
                ..ExtractionConfig::new(&config.provider.extraction_model)
            };
            let mut map = BTreeMap::new();
            let mut artifacts = Vec::new();
            for ds in &datasets {
                for task in &ds.tasks {
                    let segs = rank_segments(&extract_segments(task, &gateway, &ex_config)?);
                    let artifact = format!("segments/{}.json", task.task_id);
                    write_json(&out.join(&artifact), &segs)?;
                    artifacts.push(artifact);
                    map.insert(task.task_id.clone(), segs);
                }
            }
            Ok((map, artifacts))
        })?
    };

    // --- phase 2: generation ---
    let variants: Vec<UnderspecifiedVariant> = if manifest.phase_done("generation", &out) {
        log::info!("phase generation: already complete, skipping");
        let docs: Vec<Phase2Document> = read_json(&out.join("variants.json"))?;
        docs.iter()
            .map(|d| d.to_variant().map_err(anyhow::Error::from))
            .collect::<Result<_>>()?
    } else {
        run_phase(&mut manifest, &out, "generation", || {
            let gen_config = GenerationConfig {
                max_output_tokens: config.provider.max_output_tokens,
                ..GenerationConfig::new(&config.provider.generation_model)
            };
            let mut variants = Vec::new();
            for ds in &datasets {
                for task in &ds.tasks {
                    let segs = segments
                        .get(&task.task_id)
                        .ok_or_else(|| anyhow!("no segments for task {}", task.task_id))?;
                    let candidates = enumerate_candidates(
                        segs,
                        config.generation.max_segments,
                        config.generation.min_priority,
                    );
                    for subset in &candidates {
                        variants.push(generate_variant(
                            task,
                            subset,
                            config.generation.strategy,
                            &gateway,
                            &gen_config,
                        )?);
                    }
                }
            }
            let docs: Vec<Phase2Document> =
                variants.iter().map(Phase2Document::from_variant).collect();
            write_json(&out.join("variants.json"), &docs)?;
            Ok((variants, vec!["variants.json".to_string()]))
        })?
    };

    let variant_task = |v: &UnderspecifiedVariant| -> Result<TaskRecord> {
        tasks_by_id
            .get(&v.parent_task_id)
            .cloned()
            .ok_or_else(|| anyhow!("variant {} has unknown parent {}", v.variant_id, v.parent_task_id))
    };

    // --- phase 3: trials ---
    let trials: BTreeMap<String, Vec<TrialRecord>> = if manifest.phase_done("trials", &out) {
        log::info!("phase trials: already complete, skipping");
        let mut map: BTreeMap<String, Vec<TrialRecord>> = BTreeMap::new();
        for v in &variants {
            let mut records = Vec::new();
            for i in 0..config.trials.n {
                records.push(read_json(&out.join(trial_file(&v.variant_id, i)))?);
            }
            map.insert(v.variant_id.clone(), records);
        }
        map
    } else {
        run_phase(&mut manifest, &out, "trials", || {
            let server = if config.trials.with_user {
                let policy = SimulatorPolicy::parse(&config.trials.simulator_policy)
                    .ok_or_else(|| anyhow!("bad simulator policy"))?;
                let sim_config = SimulatorConfig {
                    model_id: config.provider.simulator_model.clone(),
                    policy,
                    max_output_tokens: config.provider.max_output_tokens,
                };
                let sim_gateway = build_gateway(config, base, oracle)?;
                let service =
                    std::sync::Arc::new(SimulatorService::new(sim_gateway, sim_config));
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

            let plan = TrialPlan {
                n_trials: config.trials.n,
                parallelism: config.trials.parallelism,
                timeout_seconds: config.trials.timeout_seconds,
                system_prompt_override: None,
                persona_suffix: config
                    .trials
                    .persona
                    .as_deref()
                    .and_then(Persona::parse)
                    .map(|p| p.suffix().to_string()),
            };

            let mut map = BTreeMap::new();
            let mut artifacts = Vec::new();
            for v in &variants {
                let task = variant_task(v)?;
                let adapter = build_adapter(&config.adapter, base, &task.task_id, &v.variant_id)?;
                let records =
                    run_trials(&task, v, adapter.as_ref(), binding.as_ref(), &plan)?;
                for record in &records {
                    let artifact = trial_file(&v.variant_id, record.trial_index);
                    write_json(&out.join(&artifact), record)?;
                    artifacts.push(artifact);
                }
                map.insert(v.variant_id.clone(), records);
            }
            if let Some(server) = server {
                server.stop();
            }
            Ok((map, artifacts))
        })?
    };

    // --- phase 4: classification ---
    let verdicts: Vec<VerdictedVariant> = if manifest.phase_done("classification", &out) {
        log::info!("phase classification: already complete, skipping");
        read_json(&out.join("verdicts.json"))?
    } else {
        run_phase(&mut manifest, &out, "classification", || {
            let judge_config = JudgeConfig {
                max_output_tokens: config.provider.max_output_tokens,
                ..JudgeConfig::new(&config.provider.judge_model)
            };
            let judge = LlmNewTaskJudge::new(&gateway, judge_config);
            let mut verdicts = Vec::new();
            for v in &variants {
                let records = trials
                    .get(&v.variant_id)
                    .ok_or_else(|| anyhow!("no trials for {}", v.variant_id))?;
                let verdict = classify(records, &v.underspecified_prompt, &judge)?;
                let states: Vec<_> = unique_terminal_states(records)?
                    .into_iter()
                    .map(|(_, s)| s)
                    .collect();
                verdicts.push(VerdictedVariant {
                    variant: v.clone(),
                    verdict,
                    terminal_states: render_terminal_states(&states),
                });
            }
            write_json(&out.join("verdicts.json"), &verdicts)?;
            Ok((verdicts, vec!["verdicts.json".to_string()]))
        })?
    };

    // --- phase 5: building ---
    if !manifest.phase_done("building", &out) {
        run_phase(&mut manifest, &out, "building", || {
            let (files, summary) =
                build_benchmarks(&verdicts, &tasks_by_id, &config.targets, config.seed)?;
            let mut artifacts = Vec::new();
            for (name, text) in files {
                fs::write(out.join(&name), text)?;
                artifacts.push(name);
            }
            write_json(&out.join("building_summary.json"), &summary)?;
            artifacts.push("building_summary.json".to_string());
            Ok(((), artifacts))
        })?;
    } else {
        log::info!("phase building: already complete, skipping");
    }

    // --- phase 6: reporting ---
    if !manifest.phase_done("reporting", &out) {
        run_phase(&mut manifest, &out, "reporting", || {
            let outcomes = variant_outcomes(
                config.trials.persona.clone(),
                &variants,
                &trials,
                &verdicts,
                &tasks_by_id,
            )?;
            let artifacts = write_reports(
                &out,
                &outcomes,
                None,
                &config.report.group_by,
                config.k,
                config.report.plots,
            )?;
            Ok(((), artifacts))
        })?;
    } else {
        log::info!("phase reporting: already complete, skipping");
    }

    Ok(manifest)
}

// --- building ------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExcludedVariant {
    pub variant_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildingSummary {
    pub excluded: Vec<ExcludedVariant>,
    pub datasets: BTreeMap<String, DatasetBuildSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetBuildSummary {
    pub selected: Vec<String>,
    pub shortfalls: BTreeMap<underspec_core::AmbiguityClass, usize>,
}

/// Samples each dataset's pool to the target distribution and renders one
/// benchmark file per dataset (datasets discovered from the verdicts'
/// parent tasks). New-task variants are excluded up front.
pub fn build_benchmarks(
    verdicts: &[VerdictedVariant],
    tasks_by_id: &BTreeMap<String, TaskRecord>,
    targets: &BTreeMap<underspec_core::AmbiguityClass, usize>,
    seed: u64,
) -> Result<(Vec<(String, String)>, BuildingSummary)> {
    use underspec_core::AmbiguityClass;

    let mut summary = BuildingSummary {
        excluded: Vec::new(),
        datasets: BTreeMap::new(),
    };
    let mut files = Vec::new();

    let mut pools: BTreeMap<String, Vec<VerdictedVariant>> = BTreeMap::new();
    for v in verdicts {
        let task = tasks_by_id
            .get(&v.variant.parent_task_id)
            .ok_or_else(|| anyhow!("unknown parent for {}", v.variant.variant_id))?;
        if v.verdict.class == AmbiguityClass::NewTask {
            summary.excluded.push(ExcludedVariant {
                variant_id: v.variant.variant_id.clone(),
                reason: "classified as new-task; the removal changed the objective".to_string(),
            });
        } else {
            pools.entry(task.dataset_id.clone()).or_default().push(v.clone());
        }
    }

    for (dataset_id, pool) in pools {
        let sample: SampleResult = sample_to_distribution(&pool, targets, seed)?;
        let records = export_benchmark(&sample.selected, tasks_by_id)?;
        files.push((format!("benchmark_{dataset_id}.json"), render_benchmark(&records)));
        summary.datasets.insert(
            dataset_id,
            DatasetBuildSummary {
                selected: sample
                    .selected
                    .iter()
                    .map(|v| v.variant.variant_id.clone())
                    .collect(),
                shortfalls: sample.shortfalls,
            },
        );
    }
    Ok((files, summary))
}

// --- reporting -------------------------------------------------------------

pub(crate) fn variant_outcomes(
    persona: Option<String>,
    variants: &[UnderspecifiedVariant],
    trials: &BTreeMap<String, Vec<TrialRecord>>,
    verdicts: &[VerdictedVariant],
    tasks_by_id: &BTreeMap<String, TaskRecord>,
) -> Result<Vec<VariantOutcome>> {
    let verdict_of: BTreeMap<&str, _> = verdicts
        .iter()
        .map(|v| (v.variant.variant_id.as_str(), v.verdict.class))
        .collect();
    let mut outcomes = Vec::new();
    for v in variants {
        let task = tasks_by_id
            .get(&v.parent_task_id)
            .ok_or_else(|| anyhow!("unknown parent for {}", v.variant_id))?;
        let records = trials
            .get(&v.variant_id)
            .ok_or_else(|| anyhow!("no trials for {}", v.variant_id))?;
        outcomes.push(VariantOutcome {
            variant_id: v.variant_id.clone(),
            dataset: task.dataset_id.clone(),
            agent_config_id: records
                .first()
                .map(|t| t.agent_config_id.clone())
                .unwrap_or_default(),
            dimension: v.headline_dimension(),
            ambiguity_class: verdict_of.get(v.variant_id.as_str()).copied(),
            persona: persona.clone(),
            trials: records.clone(),
        });
    }
    Ok(outcomes)
}

/// Writes the table (pretty text and tab-delimited), the JSON summary, and
/// optionally the plot series for every requested grouping. Returns the
/// relative paths written.
pub fn write_reports(
    out: &Path,
    outcomes: &[VariantOutcome],
    baseline: Option<&[VariantOutcome]>,
    group_by: &[String],
    k: u64,
    plots: bool,
) -> Result<Vec<String>> {
    let mut artifacts = Vec::new();
    for key_name in group_by {
        let key =
            GroupKey::parse(key_name).ok_or_else(|| anyhow!("bad group key {key_name}"))?;
        let report = breakdown_report(outcomes, baseline, key, k)?;
        let stem = format!("report_{key_name}");
        fs::write(out.join(format!("{stem}.txt")), render_table(&report))?;
        fs::write(out.join(format!("{stem}.tsv")), render_tsv(&report))?;
        write_json(&out.join(format!("{stem}.json")), &report)?;
        artifacts.push(format!("{stem}.txt"));
        artifacts.push(format!("{stem}.tsv"));
        artifacts.push(format!("{stem}.json"));
        if plots {
            let plot = format!("plots/plot_{key_name}.json");
            write_json(&out.join(&plot), &to_plot_series(&report))?;
            artifacts.push(plot);
        }
    }
    Ok(artifacts)
}

/// Tab-delimited rendering with the same columns and rounding as the
/// fixed-width table; empty cells stay empty.
pub fn render_tsv(report: &BreakdownReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "group\tvariants\ttrials\tpass@{}%\tckpt%\task%\tavg_q\tquestions\tgain/q(pass)\tgain/q(ckpt)\n",
        report.k
    ));
    let fmt1 = |v: Option<f64>| v.map(|x| format!("{x:.1}")).unwrap_or_default();
    let fmt2 = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_default();
    for row in &report.rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            row.group,
            row.n_variants,
            row.n_trials,
            fmt1(row.pass_at_k_pct),
            fmt1(row.checkpoint_accuracy_pct),
            fmt1(row.ask_rate_pct),
            fmt1(row.avg_questions_per_asking_trajectory),
            row.total_questions,
            fmt2(row.gain_per_question_pass),
            fmt2(row.gain_per_question_ckpt),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_substitute_placeholders() {
        let got = substitute(
            "{base}/scripts/{variant_id}.json",
            Path::new("/cfg"),
            "t1",
            "t1_V_S1_delete",
        )
        .unwrap();
        assert_eq!(got, "/cfg/scripts/t1_V_S1_delete.json");

        let with_self = substitute("{self}", Path::new("."), "t", "v").unwrap();
        assert!(!with_self.contains("{self}"), "placeholder must resolve");
    }

    #[test]
    fn test_phase_done_requires_artifacts_on_disk() {
        let dir = std::env::temp_dir().join(format!("underspec-manifest-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();

        let mut manifest = Manifest {
            run_name: "t".into(),
            seed: 0,
            provider_mode: ProviderMode::Replay,
            config_digest: "d".into(),
            models: BTreeMap::new(),
            prompt_templates: BTreeMap::new(),
            inputs: BTreeMap::new(),
            phases: PHASE_NAMES
                .iter()
                .map(|name| PhaseEntry {
                    name: name.to_string(),
                    status: PhaseStatus::Pending,
                    artifacts: vec![],
                })
                .collect(),
        };
        assert!(!manifest.phase_done("extraction", &dir), "pending phase");

        manifest.entry_mut("extraction").status = PhaseStatus::Complete;
        manifest.entry_mut("extraction").artifacts = vec!["segments/a.json".to_string()];
        assert!(
            !manifest.phase_done("extraction", &dir),
            "artifact missing on disk"
        );

        write_json(&dir.join("segments/a.json"), &serde_json::json!([])).unwrap();
        assert!(manifest.phase_done("extraction", &dir));

        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn test_tsv_has_header_and_empty_cells() {
        let report = BreakdownReport {
            group_key: GroupKey::Overall,
            k: 1,
            rows: vec![underspec_metrics::ReportRow {
                group: "overall".into(),
                n_variants: 2,
                n_trials: 6,
                pass_at_k_pct: Some(33.3),
                checkpoint_accuracy_pct: Some(50.0),
                ask_rate_pct: None,
                avg_questions_per_asking_trajectory: None,
                total_questions: 0,
                gain_per_question_pass: None,
                gain_per_question_ckpt: None,
            }],
        };
        let tsv = render_tsv(&report);
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("group\tvariants"));
        let cells: Vec<&str> = lines[1].split('\t').collect();
        assert_eq!(cells.len(), 10);
        assert_eq!(cells[3], "33.3");
        assert_eq!(cells[5], "", "missing ask rate renders empty");
    }
}
