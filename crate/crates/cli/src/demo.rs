//! Self-contained offline demonstration.
//!
//! Six small agent tasks, a scripted mock agent per variant, and a
//! deterministic stand-in model. `write_demo` lays the suite out on disk and
//! records every model exchange into a fixture store, so the emitted
//! config runs the whole pipeline in replay mode: no network, no
//! credentials, bit-identical output on every run.
//!
//! The six tasks are chosen so each empirical ambiguity class shows up:
//!
//! * `format-excel-sheets`   - no trial passes, outcomes differ: outcome-critical
//! * `compile-monthly-payroll` - one pass among mixed outcomes: divergent
//! * `draft-job-description` - everything passes identically: benign
//! * `filter-user-records`   - uniform failure the judge rules a completed
//!   (different) task: new-task
//! * `organize-team-wiki`    - benign, with clarifying questions asked
//! * `archive-stale-branches` - uniform failure the judge rules incomplete:
//!   outcome-critical

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use underspec_core::{
    Checkpoint, CheckpointOutcome, GroundingData, RemovalStrategy, SuccessRule, TaskRecord,
    TerminalState,
};
use underspec_gateway::{
    FixtureStore, Gateway, GatewayError, GenerationRequest, Provider, ProviderMode,
    RecordProvider,
};
use underspec_harness::mock::{MockQuestion, MockScript, MockTrial};
use underspec_pipeline::extraction::{extract_segments, rank_segments, ExtractionConfig};
use underspec_pipeline::generation::{generate_variant, GenerationConfig};
use underspec_simulator::session::SessionInputs;
use underspec_simulator::{SimulatorConfig, SimulatorService};

use crate::config::{
    AdapterConfig, DatasetConfig, GenerationSettings, ProviderConfig, ReportSettings, RunConfig,
    TrialSettings,
};
use crate::orchestrator::{run_pipeline_with_oracle, write_json};

pub const DEMO_DATASET: &str = "demo";

pub const EXTRACTION_MODEL: &str = "demo-extractor";
pub const GENERATION_MODEL: &str = "demo-generator";
pub const JUDGE_MODEL: &str = "demo-judge";
pub const SIMULATOR_MODEL: &str = "demo-simulator";

// --- task prompts -----------------------------------------------------------

pub const FORMAT_SHEETS_PROMPT: &str = r##"Find the respondent_counts.xlsx file under Documents/Data Analysis on Owncloud, and based on the source "unformatted" sheet, create a "formatted" sheet and make formatting edits based on the following requirements:
1. Change the background color of top-header cells to skyblue (#87CEEB)
2. Make sure all cell values are horizontally centered in their cells
Do not change the "unformatted" sheet, only make changes in the "formatted" sheet. Save all your changes to respondent_counts.xlsx on owncloud."##;

const PAYROLL_PROMPT: &str = "Compile the April payroll workbook for the operations team.\nUse april-attendance-data.csv in the Shared/HR folder as the attendance source and the salary rates from salary-rates.pdf.\nWrite the result to april-payroll.xlsx with one row per employee and a total row at the bottom.";

const JOB_DESCRIPTION_PROMPT: &str = "Draft a job description for a Senior Software Engineer opening and save it as jd.md.\nInclude sections for responsibilities, requirements, and benefits.";

const FILTER_USERS_PROMPT: &str = "Find me all users between the age of 18-34 in the customer database and export the matching rows to youth-segment.csv.";

const WIKI_PROMPT: &str = "Reorganize the engineering wiki so every page sits under one of the top-level spaces.\nThe layout rules are in style-guide.md at the wiki root.";

const BRANCHES_PROMPT: &str = "Archive the stale branches in the platform repository.\nBranches older than the cutoff in archive-policy.txt count as stale.\nLeave release branches alone no matter how old they are.";

// --- underspecified prompt texts the oracle emits ---------------------------

pub const FORMAT_SHEETS_DELETE_S1: &str = r##"Find the respondent_counts.xlsx file under Documents/Data Analysis on Owncloud, and based on the source "unformatted" sheet, create a "formatted" sheet and make formatting edits based on the following requirements:
1. Change the background color of top-header cells
2. Make sure all cell values are horizontally centered in their cells
Do not change the "unformatted" sheet, only make changes in the "formatted" sheet. Save all your changes to respondent_counts.xlsx on owncloud."##;

pub const FORMAT_SHEETS_DELETE_BOTH: &str = r##"Find the respondent_counts.xlsx file under Documents/Data Analysis on Owncloud, and based on the source "unformatted" sheet, create a "formatted" sheet and make formatting edits based on the following requirements:
1. Change the background color of top-header cells
2. Make sure all cell values are in their cells
Do not change the "unformatted" sheet, only make changes in the "formatted" sheet. Save all your changes to respondent_counts.xlsx on owncloud."##;

pub const FORMAT_SHEETS_VAGUIFY_BOTH: &str = r##"Find the respondent_counts.xlsx file under Documents/Data Analysis on Owncloud, and based on the source "unformatted" sheet, create a "formatted" sheet and make formatting edits based on the following requirements:
1. Change the background color of top-header cells to a specific shade of blue
2. Make sure all cell values are centered in their cells
Do not change the "unformatted" sheet, only make changes in the "formatted" sheet. Save all your changes to respondent_counts.xlsx on owncloud."##;

pub const FORMAT_SHEETS_GENERICIZE_BOTH: &str = r##"Find the respondent_counts.xlsx file under Documents/Data Analysis on Owncloud, and based on the source "unformatted" sheet, create a "formatted" sheet and make formatting edits based on the following requirements:
1. Change the background color of top-header cells to an appropriate color
2. Make sure all cell values are suitably aligned in their cells
Do not change the "unformatted" sheet, only make changes in the "formatted" sheet. Save all your changes to respondent_counts.xlsx on owncloud."##;

const PAYROLL_DELETE: &str = "Compile the April payroll workbook for the operations team.\nUse the export in the Shared/HR folder as the attendance source and the salary rates from salary-rates.pdf.\nWrite the result to april-payroll.xlsx with one row per employee and a total row at the bottom.";

const JOB_DESCRIPTION_DELETE: &str = "Draft a job description for an opening and save it as jd.md.\nInclude sections for responsibilities, requirements, and benefits.";

const FILTER_USERS_DELETE: &str = "Find me all users in the customer database and export the matching rows to youth-segment.csv.";

const WIKI_DELETE: &str =
    "Reorganize the engineering wiki so every page sits under one of the top-level spaces.";

const BRANCHES_DELETE: &str = "Archive the stale branches in the platform repository.\nBranches older than the cutoff count as stale.\nLeave release branches alone no matter how old they are.";

// --- clarifying questions and simulated-user answers -------------------------

pub const COLOR_QUESTION: &str = "What exact background color should the top-header cells be?";
pub const ALIGN_QUESTION: &str = "How should cell values be aligned in their cells?";
pub const COMPOUND_QUESTION: &str =
    "What color should the top-header cells be, and how should cell values be aligned?";
pub const OFFSCOPE_QUESTION: &str = "How many vacation days do I get this year?";
const ATTENDANCE_QUESTION: &str = "Which file should I use as the attendance source?";
const LAYOUT_QUESTION: &str = "Where are the layout rules documented?";

pub const COLOR_ANSWER: &str = "The header background must be skyblue, hex #87CEEB.";
pub const ALIGN_ANSWER: &str = "All cell values should be horizontally centered.";
pub const COMPOUND_ANSWER: &str =
    "Headers should be skyblue, hex #87CEEB, and every cell value should be horizontally centered.";
pub const OFFSCOPE_ANSWER: &str =
    "I'm not sure about that; it wasn't something I had in mind for this task.";
const ATTENDANCE_ANSWER: &str = "Use april-attendance-data.csv in the Shared/HR folder.";
const LAYOUT_ANSWER: &str = "They are written up in style-guide.md at the wiki root.";

// --- tasks -------------------------------------------------------------------

fn checkpoints(a: (&str, &str), b: (&str, &str)) -> Vec<Checkpoint> {
    vec![
        Checkpoint {
            id: a.0.to_string(),
            description: a.1.to_string(),
            kind: Default::default(),
        },
        Checkpoint {
            id: b.0.to_string(),
            description: b.1.to_string(),
            kind: Default::default(),
        },
    ]
}

fn task(id: &str, prompt: &str, cps: Vec<Checkpoint>) -> TaskRecord {
    TaskRecord {
        task_id: id.to_string(),
        dataset_id: DEMO_DATASET.to_string(),
        prompt: prompt.to_string(),
        checkpoint_spec: cps,
        success_rule: SuccessRule::AllPass,
        outcome_domain: Default::default(),
        grounding_data: None,
    }
}

pub fn demo_tasks() -> Vec<TaskRecord> {
    let mut format_sheets = task(
        "format-excel-sheets",
        FORMAT_SHEETS_PROMPT,
        checkpoints(
            ("header-color", "Top-header cells have the required background color"),
            ("centered", "All cell values are horizontally centered"),
        ),
    );
    // the one grounded task: extraction sees a golden trajectory and
    // checkpoint notes, and its segments carry usage metadata
    format_sheets.grounding_data = Some(GroundingData {
        trajectory: Some(
            "open respondent_counts.xlsx; copy the unformatted sheet to a new formatted sheet; \
             fill the top-header row with #87CEEB; set horizontal alignment to center on all \
             cells; save the workbook back to owncloud"
                .to_string(),
        ),
        checkpoint_notes: BTreeMap::from([
            (
                "header-color".to_string(),
                "compare the fill of every top-header cell against the requested hex".to_string(),
            ),
            (
                "centered".to_string(),
                "inspect the alignment property of every populated cell".to_string(),
            ),
        ]),
    });

    vec![
        format_sheets,
        task(
            "compile-monthly-payroll",
            PAYROLL_PROMPT,
            checkpoints(
                ("attendance-merged", "Attendance hours come from the correct source file"),
                ("totals-row", "The bottom totals row sums every employee row"),
            ),
        ),
        task(
            "draft-job-description",
            JOB_DESCRIPTION_PROMPT,
            checkpoints(
                ("file-created", "jd.md exists"),
                ("sections-present", "Responsibilities, requirements, and benefits sections exist"),
            ),
        ),
        task(
            "filter-user-records",
            FILTER_USERS_PROMPT,
            checkpoints(
                ("rows-filtered", "Exported rows match the requested age range"),
                ("file-exported", "youth-segment.csv exists"),
            ),
        ),
        task(
            "organize-team-wiki",
            WIKI_PROMPT,
            checkpoints(
                ("pages-nested", "Every page sits under a top-level space"),
                ("layout-applied", "Page layout follows the documented rules"),
            ),
        ),
        task(
            "archive-stale-branches",
            BRANCHES_PROMPT,
            checkpoints(
                ("stale-archived", "Exactly the branches past the cutoff are archived"),
                ("releases-untouched", "No release branch was moved"),
            ),
        ),
    ]
}

// --- mock agent scripts -------------------------------------------------------

fn state(bits: [bool; 2]) -> TerminalState {
    TerminalState::new(bits.iter().map(|b| CheckpointOutcome::Pass(*b)).collect())
}

fn trial(bits: [bool; 2], final_response: &str, total_steps: u64) -> MockTrial {
    MockTrial {
        terminal_state: state(bits),
        questions: Vec::new(),
        final_response: final_response.to_string(),
        status: underspec_core::TrialStatus::Completed,
        total_steps: Some(total_steps),
        sleep_seconds: None,
    }
}

fn asking_trial(
    bits: [bool; 2],
    question: &str,
    step_index: u64,
    final_response: &str,
    total_steps: u64,
) -> MockTrial {
    MockTrial {
        questions: vec![MockQuestion {
            question: question.to_string(),
            context: String::new(),
            step_index,
        }],
        ..trial(bits, final_response, total_steps)
    }
}

/// One scripted agent per pipeline variant, keyed by variant id.
pub fn demo_scripts() -> Vec<(String, MockScript)> {
    let script = |trials: Vec<MockTrial>| MockScript {
        agent_id: "mock-scripted".to_string(),
        trials,
    };
    vec![
        (
            // no pass, two distinct failure states: outcome-critical. Trial 0
            // asks and is told the hex, yet still paints the header wrong;
            // exactly the kind of trajectory the failure judge gets aimed at.
            "format-excel-sheets_V_S1_delete".to_string(),
            script(vec![
                asking_trial(
                    [false, true],
                    COLOR_QUESTION,
                    2,
                    "Created the formatted sheet; header filled light blue, all values centered.",
                    20,
                ),
                trial(
                    [false, false],
                    "Formatted the sheet with a navy header; values left as they were.",
                    14,
                ),
                trial(
                    [false, true],
                    "Gave the headers a pale blue fill and centered every value.",
                    16,
                ),
            ]),
        ),
        (
            // one full pass among mixed outcomes: divergent
            "compile-monthly-payroll_V_S1_delete".to_string(),
            script(vec![
                trial(
                    [true, true],
                    "Compiled april-payroll.xlsx from the April attendance export with a totals row.",
                    18,
                ),
                asking_trial(
                    [true, false],
                    ATTENDANCE_QUESTION,
                    1,
                    "Built the payroll from the confirmed attendance file.",
                    22,
                ),
                trial(
                    [true, false],
                    "Compiled the payroll from the March attendance export; totals left pending.",
                    15,
                ),
            ]),
        ),
        (
            // everything passes the same way: benign, despite the removed
            // role looking critical on paper. The graders only check
            // structure, and empirics outrank the a-priori score.
            "draft-job-description_V_S1_delete".to_string(),
            script(vec![
                trial(
                    [true, true],
                    "Drafted jd.md with responsibilities, requirements, and benefits sections.",
                    9,
                ),
                trial(
                    [true, true],
                    "Wrote the job description to jd.md with all three sections filled in.",
                    11,
                ),
                trial([true, true], "Saved jd.md covering all requested sections.", 8),
            ]),
        ),
        (
            // uniform failure, and the judge will rule the trials completed
            // the (different) task the variant describes: new-task
            "filter-user-records_V_S1_delete".to_string(),
            script(vec![
                trial(
                    [false, true],
                    "Exported every user in the customer database to youth-segment.csv.",
                    6,
                ),
                trial(
                    [false, true],
                    "Wrote youth-segment.csv containing every user on record.",
                    7,
                ),
                trial([false, true], "Exported every user row to youth-segment.csv.", 6),
            ]),
        ),
        (
            // benign again, but two of three trials ask first; this variant
            // carries the ask-rate signal in the demo report
            "organize-team-wiki_V_S1_delete".to_string(),
            script(vec![
                asking_trial(
                    [true, true],
                    LAYOUT_QUESTION,
                    3,
                    "Reorganized the wiki per the confirmed style guide.",
                    30,
                ),
                trial([true, true], "Moved every page under its top-level space.", 12),
                asking_trial(
                    [true, true],
                    LAYOUT_QUESTION,
                    2,
                    "Restructured all pages following the documented layout rules.",
                    25,
                ),
            ]),
        ),
        (
            // uniform failure the judge rules incomplete: outcome-critical
            "archive-stale-branches_V_S1_delete".to_string(),
            script(vec![
                trial(
                    [false, true],
                    "Archived the three branches untouched for more than a year.",
                    10,
                ),
                trial(
                    [false, true],
                    "Archived every branch idle for more than a year, leaving releases alone.",
                    12,
                ),
                trial(
                    [false, true],
                    "Moved branches stale for more than a year into the archive namespace.",
                    11,
                ),
            ]),
        ),
    ]
}

// --- run config ----------------------------------------------------------------

/// The config `write_demo` emits. Replay mode against the recorded fixtures;
/// the adapter launches `mock_program` with the per-variant script.
pub fn demo_config(mock_program: &str) -> RunConfig {
    use underspec_core::AmbiguityClass;
    RunConfig {
        run_name: "demo".to_string(),
        out_dir: "run".to_string(),
        seed: 7,
        k: 1,
        datasets: vec![DatasetConfig {
            dataset_id: DEMO_DATASET.to_string(),
            tasks_file: "tasks.json".to_string(),
        }],
        provider: ProviderConfig {
            mode: ProviderMode::Replay,
            fixtures_dir: Some("fixtures".to_string()),
            extraction_model: EXTRACTION_MODEL.to_string(),
            generation_model: GENERATION_MODEL.to_string(),
            judge_model: JUDGE_MODEL.to_string(),
            simulator_model: SIMULATOR_MODEL.to_string(),
            max_output_tokens: None,
        },
        generation: GenerationSettings {
            strategy: RemovalStrategy::Delete,
            max_segments: 1,
            min_priority: 0.5,
        },
        adapter: AdapterConfig::Subprocess {
            id: "mock-scripted".to_string(),
            program: mock_program.to_string(),
            args: vec![
                "mock-agent".to_string(),
                "run".to_string(),
                "--script".to_string(),
                "{base}/scripts/{variant_id}.json".to_string(),
            ],
        },
        trials: TrialSettings {
            n: 3,
            parallelism: 2,
            with_user: true,
            persona: None,
            timeout_seconds: 60,
            simulator_policy: "standard".to_string(),
        },
        targets: BTreeMap::from([
            (AmbiguityClass::OutcomeCritical, 2),
            (AmbiguityClass::Divergent, 2),
            (AmbiguityClass::Benign, 2),
        ]),
        report: ReportSettings {
            group_by: vec![
                "overall".to_string(),
                "ambiguity_class".to_string(),
                "dimension".to_string(),
            ],
            plots: true,
        },
    }
}

// --- the deterministic stand-in model ------------------------------------------

/// Answers every model exchange the demo provokes, keyed off request
/// content. Anything it does not recognize is a hard error so unexpected
/// requests surface during recording instead of becoming corrupt fixtures.
pub struct DemoOracle;

fn unexpected(what: impl std::fmt::Display) -> GatewayError {
    GatewayError::Transport(format!("demo oracle has no answer for {what}"))
}

impl Provider for DemoOracle {
    fn complete(&self, request: &GenerationRequest) -> Result<String, GatewayError> {
        let user = request.user_prompt.as_str();
        match request.response_schema.as_deref() {
            Some("segment_extraction") => extraction_reply(user),
            Some("variant_generation") => generation_reply(&request.system_prompt, user),
            Some("new_task_judge") => judge_reply(user),
            Some("failure_flags") => failure_reply(user),
            None => ask_reply(user),
            Some(other) => Err(unexpected(format_args!("schema {other:?}"))),
        }
    }
}

fn seg(
    text: &str,
    value: &str,
    dimension: &str,
    subdimension: &str,
    criticality: f64,
    guessability: f64,
) -> serde_json::Value {
    serde_json::json!({
        "text": text,
        "value": value,
        "dimension": dimension,
        "subdimension": subdimension,
        "criticality": criticality,
        "guessability": guessability,
    })
}

fn extraction_reply(user: &str) -> Result<String, GatewayError> {
    let segments = if user.contains("respondent_counts.xlsx") {
        // grounded task: usage metadata rides along
        let mut color = seg("to skyblue (#87CEEB)", "#87CEEB", "constraint", "precision", 1.0, 0.0);
        color["is_used_in_trajectory"] = serde_json::json!(true);
        color["first_use_pct"] = serde_json::json!(0.55);
        let mut center = seg(
            "horizontally centered",
            "horizontally centered",
            "constraint",
            "method",
            0.5,
            0.5,
        );
        center["is_used_in_trajectory"] = serde_json::json!(true);
        center["first_use_pct"] = serde_json::json!(0.7);
        vec![color, center]
    } else if user.contains("april-payroll.xlsx") {
        vec![
            seg(
                "Use april-attendance-data.csv in the Shared/HR folder",
                "april-attendance-data.csv",
                "input",
                "identifier",
                1.0,
                0.5,
            ),
            seg("one row per employee", "one row per employee", "goal", "format", 0.5, 0.5),
        ]
    } else if user.contains("jd.md") {
        vec![seg(
            "a Senior Software Engineer opening",
            "Senior Software Engineer",
            "goal",
            "target",
            1.0,
            0.0,
        )]
    } else if user.contains("youth-segment.csv") {
        vec![seg(
            "between the age of 18-34",
            "between the age of 18-34",
            "constraint",
            "numeric_bound",
            1.0,
            0.0,
        )]
    } else if user.contains("engineering wiki") {
        vec![seg(
            "The layout rules are in style-guide.md at the wiki root.",
            "style-guide.md",
            "context",
            "conventions",
            1.0,
            0.5,
        )]
    } else if user.contains("platform repository") {
        vec![seg("in archive-policy.txt", "archive-policy.txt", "input", "source", 1.0, 0.0)]
    } else {
        return Err(unexpected("extraction request on an unknown task"));
    };
    Ok(serde_json::json!({ "segments": segments }).to_string())
}

fn questions_for(entries: &[(&str, &str)]) -> serde_json::Value {
    let list: Vec<serde_json::Value> = entries
        .iter()
        .map(|(sid, q)| serde_json::json!({ "segment_id": sid, "questions": [q] }))
        .collect();
    serde_json::Value::Array(list)
}

fn generation_doc(
    prompt: &str,
    questions: &[(&str, &str)],
    failure_mode: &str,
) -> Result<String, GatewayError> {
    Ok(serde_json::json!({
        "underspecified_prompt": prompt,
        "expected_questions": questions_for(questions),
        "failure_mode": failure_mode,
    })
    .to_string())
}

fn generation_reply(system: &str, user: &str) -> Result<String, GatewayError> {
    let delete = system.contains("Remove this information entirely");
    let vaguify = system.contains("vague language");
    let genericize = system.contains("generic reference");

    if user.contains("respondent_counts.xlsx") {
        let both = user.contains("- S2:");
        return match (both, delete, vaguify, genericize) {
            (false, true, _, _) => generation_doc(
                FORMAT_SHEETS_DELETE_S1,
                &[("S1", COLOR_QUESTION)],
                "Without the exact hex value the agent must guess the header color; most shades fail the color checkpoint.",
            ),
            (true, true, _, _) => generation_doc(
                FORMAT_SHEETS_DELETE_BOTH,
                &[("S1", COLOR_QUESTION), ("S2", ALIGN_QUESTION)],
                "Both the exact header color and the required alignment are gone; the agent must guess formatting on two axes.",
            ),
            (true, _, true, _) => generation_doc(
                FORMAT_SHEETS_VAGUIFY_BOTH,
                &[("S1", COLOR_QUESTION), ("S2", ALIGN_QUESTION)],
                "The color is only hinted at and the alignment softened; near-miss shades and wrong alignment both fail.",
            ),
            (true, _, _, true) => generation_doc(
                FORMAT_SHEETS_GENERICIZE_BOTH,
                &[("S1", COLOR_QUESTION), ("S2", ALIGN_QUESTION)],
                "Color and alignment are reduced to generic placeholders; any concrete choice is a guess.",
            ),
            _ => Err(unexpected("a format-excel-sheets generation request")),
        };
    }
    if !delete {
        return Err(unexpected("a non-delete generation request outside the format task"));
    }
    if user.contains("april-payroll.xlsx") {
        generation_doc(
            PAYROLL_DELETE,
            &[("S1", ATTENDANCE_QUESTION)],
            "Several exports in Shared/HR could be the attendance source; the wrong one silently corrupts the payroll.",
        )
    } else if user.contains("jd.md") {
        generation_doc(
            JOB_DESCRIPTION_DELETE,
            &[("S1", "Which role is the job description for?")],
            "The agent invents a role; a description for the wrong role fails review.",
        )
    } else if user.contains("youth-segment.csv") {
        generation_doc(
            FILTER_USERS_DELETE,
            &[("S1", "Which age range should the export cover?")],
            "The filter is unconstrained; the agent exports every user instead of the intended segment.",
        )
    } else if user.contains("engineering wiki") {
        generation_doc(
            WIKI_DELETE,
            &[("S1", LAYOUT_QUESTION)],
            "The agent applies its own layout conventions instead of the documented ones.",
        )
    } else if user.contains("platform repository") {
        generation_doc(
            BRANCHES_DELETE,
            &[("S1", "Where do I find the cutoff rules for staleness?")],
            "The staleness cutoff is unspecified; the agent guesses a threshold and archives the wrong branches.",
        )
    } else {
        Err(unexpected("a generation request on an unknown task"))
    }
}

fn judge_reply(user: &str) -> Result<String, GatewayError> {
    if user.contains("every user") {
        Ok(serde_json::json!({
            "task_completed": true,
            "reasoning": "Every trial exported the full user table, which satisfies the prompt as written; the removal created a new, completable task.",
        })
        .to_string())
    } else if user.contains("more than a year") {
        Ok(serde_json::json!({
            "task_completed": false,
            "reasoning": "The prompt still demands the cutoff rules; guessing a one-year threshold does not complete the task as described.",
        })
        .to_string())
    } else {
        Err(unexpected("a new-task judge request"))
    }
}

fn ask_reply(user: &str) -> Result<String, GatewayError> {
    let q = user.to_lowercase();
    let color = q.contains("color");
    let align = q.contains("align") || q.contains("centered");
    let answer = if color && align {
        COMPOUND_ANSWER
    } else if color {
        COLOR_ANSWER
    } else if align {
        ALIGN_ANSWER
    } else if q.contains("attendance") {
        ATTENDANCE_ANSWER
    } else if q.contains("layout rules") {
        LAYOUT_ANSWER
    } else {
        // out of scope for every demo task; stay uncertain, leak nothing
        OFFSCOPE_ANSWER
    };
    Ok(answer.to_string())
}

fn failure_reply(user: &str) -> Result<String, GatewayError> {
    let section = user
        .split("## Prerequisite Status (computed)")
        .nth(1)
        .ok_or_else(|| unexpected("a failure-judge request without a prerequisite section"))?;

    // the one deliberate YES in the suite: the payroll trial that asked for
    // the attendance file, merged it, and still botched the totals row
    let partial_use = user.contains("april-attendance-data.csv") && user.contains("- success: false");

    let mut flags = Vec::new();
    for line in section.lines() {
        let Some(rest) = line.strip_prefix("- ") else { continue };
        let Some((name, status)) = rest.split_once(": ") else { continue };
        let (verdict, rationale) = if status.starts_with("NOT met") {
            ("N/A", "prerequisite not met for this trajectory")
        } else if name == "flag_partial_information_utilization" && partial_use {
            (
                "YES",
                "the confirmed attendance file was merged, but the totals row ignored the new hours",
            )
        } else {
            ("NO", "no evidence of this failure in the trajectory")
        };
        flags.push(serde_json::json!({
            "flag_name": name,
            "verdict": verdict,
            "rationale": rationale,
        }));
    }
    if flags.is_empty() {
        return Err(unexpected("a failure-judge request with no prerequisite lines"));
    }
    Ok(serde_json::json!({ "flags": flags }).to_string())
}

// --- suite assembly -------------------------------------------------------------

pub struct DemoLayout {
    pub dir: PathBuf,
    pub config_path: PathBuf,
    pub fixtures_dir: PathBuf,
    /// Output of the recording pass, kept for inspection; the emitted config
    /// replays into `run/` instead.
    pub record_dir: PathBuf,
}

/// Lays out the demo suite under `dir` and records all fixtures.
///
/// `mock_program` is stored verbatim as the adapter program; pass `{self}`
/// when the running binary is the `underspec` CLI itself, or an explicit
/// path to it otherwise.
pub fn write_demo(dir: &Path, mock_program: &str) -> Result<DemoLayout> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("tasks.json"), &demo_tasks())?;
    for (variant_id, script) in demo_scripts() {
        write_json(&dir.join(format!("scripts/{variant_id}.json")), &script)?;
    }

    let config = demo_config(mock_program);
    write_json(&dir.join("config.json"), &config)?;

    // recording pass: same pipeline, same digests, oracle behind the store
    let mut record_config = config.clone();
    record_config.provider.mode = ProviderMode::Record;
    record_config.out_dir = "record-run".to_string();
    let oracle = || Box::new(DemoOracle) as Box<dyn Provider>;
    run_pipeline_with_oracle(&record_config, dir, Some(&oracle))
        .context("demo recording pass failed")?;

    record_extra_fixtures(dir, &record_config)?;
    crate::ops::judge_failures(&record_config, dir, Some(&oracle))
        .context("demo failure judging failed")?;

    Ok(DemoLayout {
        dir: dir.to_path_buf(),
        config_path: dir.join("config.json"),
        fixtures_dir: dir.join("fixtures"),
        record_dir: dir.join("record-run"),
    })
}

fn recording_gateway(dir: &Path) -> Gateway {
    Gateway::new(Box::new(RecordProvider::new(
        Box::new(DemoOracle),
        FixtureStore::new(dir.join("fixtures")),
    )))
}

/// Exchanges the pipeline itself never triggers but the removal-strategy
/// and simulator walkthroughs replay: the two-segment format variant under
/// all three strategies, and a question battery against its simulated user.
fn record_extra_fixtures(dir: &Path, config: &RunConfig) -> Result<()> {
    let tasks = demo_tasks();
    let format_task = &tasks[0];

    let gateway = recording_gateway(dir);
    let segments = rank_segments(&extract_segments(
        format_task,
        &gateway,
        &ExtractionConfig::new(&config.provider.extraction_model),
    )?);
    let gen_config = GenerationConfig::new(&config.provider.generation_model);
    for strategy in [
        RemovalStrategy::Delete,
        RemovalStrategy::Vaguify,
        RemovalStrategy::Genericize,
    ] {
        generate_variant(format_task, &segments, strategy, &gateway, &gen_config)?;
    }

    let service = SimulatorService::new(
        recording_gateway(dir),
        SimulatorConfig::new(&config.provider.simulator_model),
    );
    let (session, _) = service
        .registry
        .open(both_segments_session(None))
        .map_err(|e| anyhow::anyhow!("demo session rejected: {e}"))?;
    for question in [COLOR_QUESTION, ALIGN_QUESTION, COMPOUND_QUESTION, OFFSCOPE_QUESTION] {
        service
            .ask(&session, question, "")
            .map_err(|e| anyhow::anyhow!("demo ask failed: {e}"))?;
    }
    Ok(())
}

/// Session inputs for the two-segment delete variant of the format task,
/// as used by the simulator walkthrough.
pub fn both_segments_session(client_key: Option<String>) -> SessionInputs {
    SessionInputs {
        variant_id: "format-excel-sheets_V_S1_S2_delete".to_string(),
        original_prompt: FORMAT_SHEETS_PROMPT.to_string(),
        underspecified_prompt: FORMAT_SHEETS_DELETE_BOTH.to_string(),
        removed_values: vec!["#87CEEB".to_string(), "horizontally centered".to_string()],
        client_key,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use underspec_pipeline::generation::{check_line_preservation, verify_removal};

    #[test]
    fn test_demo_tasks_and_scripts_line_up() {
        let tasks = demo_tasks();
        assert_eq!(tasks.len(), 6);
        let scripts = demo_scripts();
        assert_eq!(scripts.len(), 6);
        for (task, (variant_id, script)) in tasks.iter().zip(&scripts) {
            assert!(
                variant_id.starts_with(&task.task_id),
                "script {variant_id} does not match task {}",
                task.task_id
            );
            assert_eq!(script.trials.len(), 3, "{variant_id} needs 3 scripted trials");
            for t in &script.trials {
                assert_eq!(t.terminal_state.arity(), 2, "all demo tasks declare 2 checkpoints");
            }
        }
    }

    #[test]
    fn test_canned_variants_actually_remove_their_values() {
        // every canned rewrite must satisfy the same checks generation
        // enforces, or replay would die mid-pipeline
        let cases: [(&str, &str, Vec<&str>); 8] = [
            (FORMAT_SHEETS_PROMPT, FORMAT_SHEETS_DELETE_S1, vec!["#87CEEB"]),
            (
                FORMAT_SHEETS_PROMPT,
                FORMAT_SHEETS_DELETE_BOTH,
                vec!["#87CEEB", "horizontally centered"],
            ),
            (
                FORMAT_SHEETS_PROMPT,
                FORMAT_SHEETS_VAGUIFY_BOTH,
                vec!["#87CEEB", "horizontally centered"],
            ),
            (
                FORMAT_SHEETS_PROMPT,
                FORMAT_SHEETS_GENERICIZE_BOTH,
                vec!["#87CEEB", "horizontally centered"],
            ),
            (PAYROLL_PROMPT, PAYROLL_DELETE, vec!["april-attendance-data.csv"]),
            (JOB_DESCRIPTION_PROMPT, JOB_DESCRIPTION_DELETE, vec!["Senior Software Engineer"]),
            (FILTER_USERS_PROMPT, FILTER_USERS_DELETE, vec!["between the age of 18-34"]),
            (BRANCHES_PROMPT, BRANCHES_DELETE, vec!["archive-policy.txt"]),
        ];
        for (original, variant, values) in &cases {
            for value in values {
                assert!(!variant.contains(value), "{value} leaked into a canned variant");
            }
            check_line_preservation(original, variant, values).expect("untouched lines preserved");
        }
        // the wiki variant drops a whole line
        assert!(verify_removal(WIKI_DELETE, &underspec_core::Segment {
            id: "S1".into(),
            text: "The layout rules are in style-guide.md at the wiki root.".into(),
            value: "style-guide.md".into(),
            dimension: underspec_core::Dimension::Context,
            subdimension: underspec_core::Subdimension::Conventions,
            criticality: underspec_core::Level3Score::One,
            guessability: underspec_core::Level3Score::Half,
            grounding: None,
        }));
        check_line_preservation(WIKI_PROMPT, WIKI_DELETE, &["style-guide.md"]).unwrap();
    }

    #[test]
    fn test_oracle_answers_every_extraction() {
        for task in demo_tasks() {
            let reply = extraction_reply(&task.prompt).expect("extraction covered");
            let value: serde_json::Value = serde_json::from_str(&reply).unwrap();
            assert!(!value["segments"].as_array().unwrap().is_empty());
        }
    }

    #[test]
    fn test_oracle_ask_covers_scope_and_uncertainty() {
        let compound = ask_reply(COMPOUND_QUESTION).unwrap();
        assert!(compound.contains("#87CEEB") && compound.contains("horizontally centered"));
        let color = ask_reply(COLOR_QUESTION).unwrap();
        assert!(color.contains("#87CEEB") && !color.contains("horizontally centered"));
        let offscope = ask_reply(OFFSCOPE_QUESTION).unwrap();
        assert!(!offscope.contains("#87CEEB") && !offscope.contains("horizontally centered"));
        assert!(offscope.to_lowercase().contains("not sure"));
    }

    #[test]
    fn test_oracle_failure_flags_follow_prerequisite_lines() {
        let user = "## Outcome\n- success: false\n\n## Trajectory\n[step 1] Q: which file?\n  A: Use april-attendance-data.csv in the Shared/HR folder.\n\n## Prerequisite Status (computed)\n- flag_vague_questions: met; N/A is not a valid answer\n- flag_excessive_cost: NOT met; answer N/A\n- flag_partial_information_utilization: met; N/A is not a valid answer\n";
        let reply = failure_reply(user).unwrap();
        let value: serde_json::Value = serde_json::from_str(&reply).unwrap();
        let flags = value["flags"].as_array().unwrap();
        assert_eq!(flags.len(), 3);
        assert_eq!(flags[0]["verdict"], "NO");
        assert_eq!(flags[1]["verdict"], "N/A");
        assert_eq!(flags[2]["verdict"], "YES", "the deliberate partial-utilization hit");
    }
}
