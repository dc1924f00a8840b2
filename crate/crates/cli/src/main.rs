use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use underspec_cli::config::{parse_targets, RunConfig};
use underspec_cli::ops::{self, ProviderOptions, TrialsOptions};
use underspec_cli::{demo, orchestrator};
use underspec_harness::mock::{run_stdio, MockScript};
use underspec_simulator::{
    http, mcp, SessionInputs, SimulatorConfig, SimulatorPolicy, SimulatorService,
};

#[derive(Parser)]
#[command(
    name = "underspec",
    about = "Turn well-specified agent tasks into validated underspecified variants",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

/// Provider flags shared by every subcommand that talks to a model.
#[derive(Args, Debug)]
struct ProviderArgs {
    /// live, record, or replay
    #[arg(long, default_value = "live")]
    mode: String,
    /// Fixture directory for record and replay modes
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Per-request output token cap
    #[arg(long)]
    max_output_tokens: Option<u32>,
}

impl ProviderArgs {
    fn options(&self) -> Result<ProviderOptions> {
        Ok(ProviderOptions {
            mode: ops::parse_mode(&self.mode)?,
            fixtures: self.fixtures.clone(),
            max_output_tokens: self.max_output_tokens,
        })
    }
}

#[derive(Subcommand)]
enum Commands {
    /// Extract and rank removable segments from one task
    Extract {
        /// Task file (single document, or an array with --task-id)
        #[arg(long)]
        task: PathBuf,
        /// Picks a task out of a multi-task file
        #[arg(long)]
        task_id: Option<String>,
        /// Grounding data file to attach before extraction
        #[arg(long)]
        grounding: Option<PathBuf>,
        #[arg(long)]
        model: String,
        #[command(flatten)]
        provider: ProviderArgs,
        /// Segments output file
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate underspecified variants from ranked segments
    Generate {
        #[arg(long)]
        task: PathBuf,
        #[arg(long)]
        task_id: Option<String>,
        /// Segments file from `extract`
        #[arg(long)]
        segments: PathBuf,
        /// delete, vaguify, or genericize
        #[arg(long, default_value = "delete")]
        strategy: String,
        #[arg(long, default_value_t = 1)]
        max_segments: usize,
        #[arg(long, default_value_t = 0.5)]
        min_priority: f64,
        #[arg(long)]
        model: String,
        #[command(flatten)]
        provider: ProviderArgs,
        /// Variant documents output file
        #[arg(long)]
        out: PathBuf,
    },
    /// Run agent trials for every variant in a file
    Trials {
        /// Task file covering the variants' parent tasks
        #[arg(long)]
        tasks: PathBuf,
        /// Variant documents from `generate`
        #[arg(long)]
        variants: PathBuf,
        /// Adapter description file; relative paths in it resolve against
        /// its own directory
        #[arg(long)]
        adapter: PathBuf,
        /// Trials per variant
        #[arg(long, default_value_t = 3)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        /// Serve the simulated user tool to the agent
        #[arg(long)]
        with_user: bool,
        /// Persona note appended to the agent instructions
        #[arg(long)]
        persona: Option<String>,
        #[arg(long, default_value_t = 1800)]
        timeout_seconds: u64,
        /// Simulator answer policy (with --with-user)
        #[arg(long, default_value = "standard")]
        policy: String,
        /// Simulator model id (with --with-user)
        #[arg(long, default_value = "simulator")]
        simulator_model: String,
        #[command(flatten)]
        provider: ProviderArgs,
        /// Directory for trial records, one file per trial
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Classify variants from their trial outcomes
    Classify {
        #[arg(long)]
        variants: PathBuf,
        /// Directory holding `<variant_id>/trial_NNN.json` records
        #[arg(long)]
        trials_dir: PathBuf,
        /// Judge model for zero-question uniform outcomes
        #[arg(long)]
        model: String,
        #[command(flatten)]
        provider: ProviderArgs,
        /// Verdicts output file
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample verdicted variants into benchmark files
    Build {
        /// Verdict files from `classify` (repeatable)
        #[arg(long, required = true)]
        verdicts: Vec<PathBuf>,
        /// Task files covering the variants (repeatable)
        #[arg(long, required = true)]
        tasks: Vec<PathBuf>,
        /// Class counts, e.g. oc:40,div:30,ben:30
        #[arg(long)]
        targets: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compute grouped metric tables from trial records
    Report {
        #[arg(long)]
        verdicts: PathBuf,
        #[arg(long)]
        trials_dir: PathBuf,
        #[arg(long, required = true)]
        tasks: Vec<PathBuf>,
        /// Paired trials of the same variants; fills the gain columns
        #[arg(long)]
        baseline_trials_dir: Option<PathBuf>,
        /// Group keys: overall, dataset, dimension, ambiguity_class,
        /// agent_config, persona (repeatable)
        #[arg(long, default_values_t = [String::from("overall")])]
        group_by: Vec<String>,
        /// k for pass@k
        #[arg(long, default_value_t = 1)]
        k: u64,
        /// Also write per-group plot series
        #[arg(long)]
        plots: bool,
        /// Persona label recorded on every outcome row
        #[arg(long)]
        persona: Option<String>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Judge question-asking failure patterns over a completed run
    JudgeFailures {
        /// The run config whose artifacts to judge
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the whole pipeline from a config file
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write the offline demo suite (tasks, scripts, config, fixtures)
    Demo {
        /// Target directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Scripted mock agent
    MockAgent {
        #[command(subcommand)]
        command: MockAgentCommands,
    },
    /// Simulated-user tool service
    Simulator {
        #[command(subcommand)]
        command: SimulatorCommands,
    },
}

#[derive(Subcommand)]
enum MockAgentCommands {
    /// Answer one adapter request on stdin, print the response to stdout
    Run {
        #[arg(long)]
        script: PathBuf,
    },
    /// Answer adapter requests over HTTP
    Serve {
        #[arg(long)]
        script: PathBuf,
        #[arg(long, default_value = "127.0.0.1:0")]
        addr: SocketAddr,
    },
}

#[derive(Subcommand)]
enum SimulatorCommands {
    /// Serve the user tool over HTTP
    Serve {
        #[arg(long, default_value = "127.0.0.1:0")]
        addr: SocketAddr,
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "standard")]
        policy: String,
        #[command(flatten)]
        provider: ProviderArgs,
    },
    /// Serve one session's user tool over MCP on stdio
    Mcp {
        /// Session inputs file (variant id, prompts, removed values)
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "standard")]
        policy: String,
        #[command(flatten)]
        provider: ProviderArgs,
    },
}

fn parse_policy(s: &str) -> Result<SimulatorPolicy> {
    SimulatorPolicy::parse(s).ok_or_else(|| anyhow!("unknown simulator policy {s:?}"))
}

fn main() -> Result<()> {
    env_logger::init();
    let cli = Cli::parse();

    match cli.command {
        Commands::Extract {
            task,
            task_id,
            grounding,
            model,
            provider,
            out,
        } => {
            let n = ops::extract_cmd(
                &task,
                task_id.as_deref(),
                grounding.as_deref(),
                &model,
                &provider.options()?,
                &out,
            )?;
            println!("wrote {n} segments to {}", out.display());
        }
        Commands::Generate {
            task,
            task_id,
            segments,
            strategy,
            max_segments,
            min_priority,
            model,
            provider,
            out,
        } => {
            let n = ops::generate_cmd(
                &task,
                task_id.as_deref(),
                &segments,
                ops::parse_strategy(&strategy)?,
                max_segments,
                min_priority,
                &model,
                &provider.options()?,
                &out,
            )?;
            println!("wrote {n} variants to {}", out.display());
        }
        Commands::Trials {
            tasks,
            variants,
            adapter,
            n,
            parallelism,
            with_user,
            persona,
            timeout_seconds,
            policy,
            simulator_model,
            provider,
            out_dir,
        } => {
            let options = TrialsOptions {
                n,
                parallelism,
                with_user,
                persona,
                timeout_seconds,
                policy,
                simulator_model,
            };
            let written =
                ops::trials_cmd(&tasks, &variants, &adapter, &out_dir, &options, &provider.options()?)?;
            println!("wrote {written} trial records under {}", out_dir.display());
        }
        Commands::Classify {
            variants,
            trials_dir,
            model,
            provider,
            out,
        } => {
            let tally = ops::classify_cmd(&variants, &trials_dir, &model, &provider.options()?, &out)?;
            let parts: Vec<String> = tally.iter().map(|(c, n)| format!("{c}: {n}")).collect();
            println!("wrote verdicts to {} ({})", out.display(), parts.join(", "));
        }
        Commands::Build {
            verdicts,
            tasks,
            targets,
            seed,
            out_dir,
        } => {
            let targets: BTreeMap<_, _> = parse_targets(&targets)?;
            let names = ops::build_cmd(&verdicts, &tasks, &targets, seed, &out_dir)?;
            for name in names {
                println!("wrote {}", out_dir.join(name).display());
            }
        }
        Commands::Report {
            verdicts,
            trials_dir,
            tasks,
            baseline_trials_dir,
            group_by,
            k,
            plots,
            persona,
            out_dir,
        } => {
            let files = ops::report_cmd(
                &verdicts,
                &trials_dir,
                &tasks,
                baseline_trials_dir.as_deref(),
                &out_dir,
                &group_by,
                k,
                plots,
                persona,
            )?;
            for file in files {
                println!("wrote {}", out_dir.join(file).display());
            }
        }
        Commands::JudgeFailures { config } => {
            let (config, base) = RunConfig::load(&config)?;
            let judged = ops::judge_failures(&config, &base, None)?;
            println!("judged {judged} question-asking trials");
        }
        Commands::Run { config } => {
            let (config, base) = RunConfig::load(&config)?;
            orchestrator::run_pipeline(&config, &base)?;
            println!("run {} complete", config.run_name);
        }
        Commands::Demo { out } => {
            let layout = demo::write_demo(&out, "{self}")?;
            println!("demo written to {}", layout.dir.display());
            println!("  config:   {}", layout.config_path.display());
            println!("  fixtures: {}", layout.fixtures_dir.display());
            println!("replay it with: underspec run --config {}", layout.config_path.display());
        }
        Commands::MockAgent { command } => match command {
            MockAgentCommands::Run { script } => {
                let script: MockScript = orchestrator::read_json(&script)?;
                run_stdio(script).context("mock agent failed")?;
            }
            MockAgentCommands::Serve { script, addr } => {
                let script: MockScript = orchestrator::read_json(&script)?;
                ops::serve_mock(script, addr)?;
            }
        },
        Commands::Simulator { command } => match command {
            SimulatorCommands::Serve {
                addr,
                model,
                policy,
                provider,
            } => {
                let config = SimulatorConfig {
                    model_id: model,
                    policy: parse_policy(&policy)?,
                    max_output_tokens: provider.max_output_tokens,
                };
                let gateway = provider.options()?.gateway()?;
                let service = Arc::new(SimulatorService::new(gateway, config));
                let handle = http::serve(service, addr)?;
                println!("simulator listening on {}", handle.base_url());
                // park until killed; the server runs on its own thread
                loop {
                    std::thread::park();
                }
            }
            SimulatorCommands::Mcp {
                session,
                model,
                policy,
                provider,
            } => {
                let inputs: SessionInputs = orchestrator::read_json(&session)?;
                let config = SimulatorConfig {
                    model_id: model,
                    policy: parse_policy(&policy)?,
                    max_output_tokens: provider.max_output_tokens,
                };
                let gateway = provider.options()?.gateway()?;
                let service = SimulatorService::new(gateway, config);
                let (session_id, _) = service
                    .registry
                    .open(inputs)
                    .map_err(|e| anyhow!("cannot open session: {e}"))?;
                mcp::serve_stdio(&service, &session_id)?;
            }
        },
    }
    Ok(())
}
