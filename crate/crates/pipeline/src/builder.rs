//! Benchmark building: baseline filters, distribution sampling, export.
//!
//! Base tasks first pass competence filters (the agent must be able to do
//! the *fully specified* task, otherwise failures under underspecification
//! mean nothing). Classified variants are then sampled to a target class
//! mix, spreading selections across parent tasks, dimensions, and removed
//! segment counts, and finally exported in the benchmark-ready schema.

use crate::PipelineError;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use underspec_core::{
    AmbiguityClass, AmbiguityVerdict, Dimension, ExpectedQuestions, Subdimension, TaskRecord,
    UnderspecifiedVariant,
};

// ---------------------------------------------------------------------------
// Baseline filters

/// Reference-model results for one base task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskBaseline {
    pub task_id: String,
    /// Keyed by model config id.
    pub model_results: BTreeMap<String, ModelBaseline>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBaseline {
    pub checkpoint_accuracy: f64,
    pub pass_at_3: f64,
}

/// Which tasks survived a filter, and why the others did not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    pub kept: Vec<String>,
    pub excluded: Vec<Exclusion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub task_id: String,
    pub reason: String,
}

/// Keeps tasks whose mean checkpoint accuracy across the reference models is
/// at or above `threshold` (boundary kept). Tasks missing any reference
/// model's results are excluded, with the gap recorded.
pub fn filter_partial_completion(
    baselines: &[TaskBaseline],
    reference_models: &[String],
    threshold: f64,
) -> FilterOutcome {
    split(baselines, |task| {
        let mut sum = 0.0;
        for model in reference_models {
            match task.model_results.get(model) {
                Some(r) => sum += r.checkpoint_accuracy,
                None => return Err(format!("no results for reference model {model}")),
            }
        }
        let mean = sum / reference_models.len() as f64;
        if mean >= threshold {
            Ok(())
        } else {
            Err(format!(
                "mean checkpoint accuracy {mean:.3} below threshold {threshold}"
            ))
        }
    })
}

/// Keeps tasks with `pass@3 > 0` under every reference model: each model
/// must have solved the fully specified task at least once.
pub fn filter_full_completion(
    baselines: &[TaskBaseline],
    reference_models: &[String],
) -> FilterOutcome {
    split(baselines, |task| {
        for model in reference_models {
            match task.model_results.get(model) {
                Some(r) if r.pass_at_3 > 0.0 => {}
                Some(_) => return Err(format!("pass@3 = 0 under {model}")),
                None => return Err(format!("no results for reference model {model}")),
            }
        }
        Ok(())
    })
}

fn split(
    baselines: &[TaskBaseline],
    keep: impl Fn(&TaskBaseline) -> Result<(), String>,
) -> FilterOutcome {
    let mut outcome = FilterOutcome {
        kept: Vec::new(),
        excluded: Vec::new(),
    };
    for task in baselines {
        match keep(task) {
            Ok(()) => outcome.kept.push(task.task_id.clone()),
            Err(reason) => {
                log::info!("filtering out {}: {reason}", task.task_id);
                outcome.excluded.push(Exclusion {
                    task_id: task.task_id.clone(),
                    reason,
                });
            }
        }
    }
    outcome
}

/// Keeps tasks declaring at least `min_f2p` fail-to-pass checkpoints. Used
/// as a pre-filter on repair-style datasets where success is measured on the
/// F2P set.
pub fn filter_f2p_arity(tasks: &[TaskRecord], min_f2p: usize) -> FilterOutcome {
    let mut outcome = FilterOutcome {
        kept: Vec::new(),
        excluded: Vec::new(),
    };
    for task in tasks {
        let arity = task.f2p_arity();
        if arity >= min_f2p {
            outcome.kept.push(task.task_id.clone());
        } else {
            outcome.excluded.push(Exclusion {
                task_id: task.task_id.clone(),
                reason: format!("only {arity} fail-to-pass checkpoints, need {min_f2p}"),
            });
        }
    }
    outcome
}

// ---------------------------------------------------------------------------
// Distribution sampling

/// A variant paired with its classification evidence, as persisted after
/// Phase 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictedVariant {
    pub variant: UnderspecifiedVariant,
    pub verdict: AmbiguityVerdict,
    /// Rendered unique terminal states, e.g. "[(1, 1)]". Carried verbatim
    /// into the benchmark export.
    pub terminal_states: String,
}

/// Output of [`sample_to_distribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub selected: Vec<VerdictedVariant>,
    /// Classes whose pool was smaller than the target, with the gap size.
    pub shortfalls: BTreeMap<AmbiguityClass, usize>,
}

impl SampleResult {
    pub fn count_for(&self, class: AmbiguityClass) -> usize {
        self.selected
            .iter()
            .filter(|v| v.verdict.class == class)
            .count()
    }
}

/// Samples the pool down to `targets` per ambiguity class.
///
/// Within a class, picks round-robin over parent tasks, then over dimensions
/// within a parent, then over removed-segment counts, so the selection
/// spreads across all three diversity axes; the member drawn from a stratum
/// is chosen by a seeded shuffle. When a class has fewer members than its
/// target, everything available is taken and the gap is reported rather
/// than failing.
pub fn sample_to_distribution(
    pool: &[VerdictedVariant],
    targets: &BTreeMap<AmbiguityClass, usize>,
    seed: u64,
) -> Result<SampleResult, PipelineError> {
    if let Some(v) = pool.iter().find(|v| v.verdict.class == AmbiguityClass::NewTask) {
        return Err(PipelineError::ContractViolation(format!(
            "new-task variants must be excluded before sampling (found {})",
            v.variant.variant_id
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut result = SampleResult {
        selected: Vec::new(),
        shortfalls: BTreeMap::new(),
    };

    // fixed class order keeps the rng stream, and thus the selection, stable
    for class in [
        AmbiguityClass::OutcomeCritical,
        AmbiguityClass::Divergent,
        AmbiguityClass::Benign,
    ] {
        let Some(&target) = targets.get(&class) else {
            continue;
        };
        let members: Vec<&VerdictedVariant> = pool
            .iter()
            .filter(|v| v.verdict.class == class)
            .collect();
        let picked = pick_spread(&members, target, &mut rng);
        if picked.len() < target {
            result.shortfalls.insert(class, target - picked.len());
        }
        result.selected.extend(picked.into_iter().cloned());
    }
    Ok(result)
}

/// Round-robin pick over parent -> dimension -> segment-count strata.
fn pick_spread<'p>(
    members: &[&'p VerdictedVariant],
    target: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<&'p VerdictedVariant> {
    // group into the stratum tree; BTreeMaps give a stable stratum order
    type CountLeaves<'p> = BTreeMap<usize, Vec<&'p VerdictedVariant>>;
    type DimTree<'p> = BTreeMap<String, CountLeaves<'p>>;
    let mut tree: BTreeMap<String, DimTree<'p>> = BTreeMap::new();
    for v in members {
        let parent = v.variant.parent_task_id.clone();
        let dimension = v
            .variant
            .headline_dimension()
            .map(|d| d.as_str().to_string())
            .unwrap_or_default();
        let count = v.variant.removed_segments.len();
        tree.entry(parent)
            .or_default()
            .entry(dimension)
            .or_default()
            .entry(count)
            .or_default()
            .push(v);
    }

    // freeze into cursor-carrying vectors; leaves are shuffled once so pops
    // take a seeded-random member of the stratum
    struct Dim<'p> {
        leaves: Vec<Vec<&'p VerdictedVariant>>,
        cursor: usize,
    }
    struct Parent<'p> {
        dims: Vec<Dim<'p>>,
        cursor: usize,
    }
    let mut parents: Vec<Parent<'p>> = tree
        .into_values()
        .map(|dims| Parent {
            dims: dims
                .into_values()
                .map(|counts| Dim {
                    leaves: counts
                        .into_values()
                        .map(|mut leaf| {
                            leaf.shuffle(rng);
                            leaf
                        })
                        .collect(),
                    cursor: 0,
                })
                .collect(),
            cursor: 0,
        })
        .collect();

    fn pick_dim<'p>(dim: &mut Dim<'p>) -> Option<&'p VerdictedVariant> {
        let n = dim.leaves.len();
        for k in 0..n {
            let i = (dim.cursor + k) % n;
            if let Some(v) = dim.leaves[i].pop() {
                dim.cursor = (i + 1) % n;
                return Some(v);
            }
        }
        None
    }

    fn pick_parent<'p>(parent: &mut Parent<'p>) -> Option<&'p VerdictedVariant> {
        let n = parent.dims.len();
        for k in 0..n {
            let i = (parent.cursor + k) % n;
            if let Some(v) = pick_dim(&mut parent.dims[i]) {
                parent.cursor = (i + 1) % n;
                return Some(v);
            }
        }
        None
    }

    let mut picked = Vec::new();
    let mut cursor = 0;
    'fill: while picked.len() < target && !parents.is_empty() {
        let n = parents.len();
        for k in 0..n {
            let i = (cursor + k) % n;
            if let Some(v) = pick_parent(&mut parents[i]) {
                cursor = (i + 1) % n;
                picked.push(v);
                continue 'fill;
            }
        }
        break; // every stratum is empty
    }
    picked
}

// ---------------------------------------------------------------------------
// Benchmark export

/// One record of the released benchmark schema.
///
/// Field order is meaningful: serialization writes fields in declaration
/// order, and export -> import -> export must be byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase3Record {
    pub variant_id: String,
    pub underspecified_prompt: String,
    pub information_dimension: Dimension,
    pub ambiguity_class: AmbiguityClass,
    pub removed_segments: Vec<Phase3Segment>,
    pub expected_questions: Vec<ExpectedQuestions>,
    /// Unique checkpoint pass/fail tuples observed in trials, rendered as
    /// e.g. "[(1, 1)]" and preserved verbatim on import.
    pub terminal_states: String,
    pub original_prompt: String,
    pub original_task: String,
    pub dataset: String,
}

/// The public subset of segment metadata: scores stay internal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase3Segment {
    pub id: String,
    pub dimension: Dimension,
    pub subdimension: Subdimension,
    pub value: String,
}

/// Converts sampled variants to benchmark records. `tasks` supplies each
/// parent's original prompt and dataset id.
pub fn export_benchmark(
    samples: &[VerdictedVariant],
    tasks: &BTreeMap<String, TaskRecord>,
) -> Result<Vec<Phase3Record>, PipelineError> {
    let mut records = Vec::with_capacity(samples.len());
    for sample in samples {
        let variant = &sample.variant;
        if sample.verdict.class == AmbiguityClass::NewTask {
            return Err(PipelineError::ContractViolation(format!(
                "variant {} is new-task and cannot be exported",
                variant.variant_id
            )));
        }
        if variant.expected_questions.is_empty()
            || variant.expected_questions.iter().all(|eq| eq.questions.is_empty())
        {
            return Err(PipelineError::ContractViolation(format!(
                "variant {} has no expected questions",
                variant.variant_id
            )));
        }
        let task = tasks.get(&variant.parent_task_id).ok_or_else(|| {
            PipelineError::ContractViolation(format!(
                "no task record for parent {} of {}",
                variant.parent_task_id, variant.variant_id
            ))
        })?;
        let dimension = variant.headline_dimension().ok_or_else(|| {
            PipelineError::ContractViolation(format!(
                "variant {} has no removed segments",
                variant.variant_id
            ))
        })?;
        records.push(Phase3Record {
            variant_id: variant.variant_id.clone(),
            underspecified_prompt: variant.underspecified_prompt.clone(),
            information_dimension: dimension,
            ambiguity_class: sample.verdict.class,
            removed_segments: variant
                .removed_segments
                .iter()
                .map(|s| Phase3Segment {
                    id: s.id.clone(),
                    dimension: s.dimension,
                    subdimension: s.subdimension,
                    value: s.value.clone(),
                })
                .collect(),
            expected_questions: variant.expected_questions.clone(),
            terminal_states: sample.terminal_states.clone(),
            original_prompt: task.prompt.clone(),
            original_task: task.task_id.clone(),
            dataset: task.dataset_id.clone(),
        });
    }
    Ok(records)
}

/// Canonical file rendering of a benchmark. [`parse_benchmark`] of this text
/// re-renders byte-identically.
pub fn render_benchmark(records: &[Phase3Record]) -> String {
    let mut text = serde_json::to_string_pretty(records).expect("benchmark records serialize");
    text.push('\n');
    text
}

pub fn parse_benchmark(text: &str) -> Result<Vec<Phase3Record>, PipelineError> {
    let records: Vec<Phase3Record> = serde_json::from_str(text)
        .map_err(|e| PipelineError::ContractViolation(format!("benchmark file malformed: {e}")))?;
    for r in &records {
        if r.expected_questions.is_empty() {
            return Err(PipelineError::ContractViolation(format!(
                "benchmark record {} has no expected questions",
                r.variant_id
            )));
        }
    }
    Ok(records)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use underspec_core::{Level3Score, RemovalStrategy, Segment, SuccessRule};

    fn baseline(task_id: &str, scores: &[(&str, f64, f64)]) -> TaskBaseline {
        TaskBaseline {
            task_id: task_id.to_string(),
            model_results: scores
                .iter()
                .map(|(m, ckpt, p3)| {
                    (
                        m.to_string(),
                        ModelBaseline {
                            checkpoint_accuracy: *ckpt,
                            pass_at_3: *p3,
                        },
                    )
                })
                .collect(),
        }
    }

    fn models() -> Vec<String> {
        vec!["m1".to_string(), "m2".to_string(), "m3".to_string()]
    }

    #[test]
    fn test_partial_completion_keeps_boundary_mean() {
        let tasks = vec![
            baseline("ok", &[("m1", 0.6, 1.0), ("m2", 0.5, 1.0), ("m3", 0.4, 1.0)]),
            baseline("low", &[("m1", 0.2, 1.0), ("m2", 0.2, 1.0), ("m3", 0.2, 1.0)]),
        ];
        let out = filter_partial_completion(&tasks, &models(), 0.5);
        // mean exactly 0.5 stays in
        assert_eq!(out.kept, vec!["ok"]);
        assert_eq!(out.excluded.len(), 1);
        assert_eq!(out.excluded[0].task_id, "low");
    }

    #[test]
    fn test_partial_completion_excludes_missing_model_with_reason() {
        let tasks = vec![baseline("gap", &[("m1", 0.9, 1.0), ("m2", 0.9, 1.0)])];
        let out = filter_partial_completion(&tasks, &models(), 0.5);
        assert!(out.kept.is_empty());
        assert!(out.excluded[0].reason.contains("m3"));
    }

    #[test]
    fn test_partial_completion_tac_shaped_pool() {
        // 33 tasks, 13 of which clear the 50% mean bar
        let mut tasks = Vec::new();
        for i in 0..33 {
            let base = if i < 13 { 0.55 } else { 0.30 };
            tasks.push(baseline(
                &format!("tac_{i:02}"),
                &[
                    ("m1", base + 0.05, 1.0),
                    ("m2", base, 1.0),
                    ("m3", base - 0.05, 1.0),
                ],
            ));
        }
        let out = filter_partial_completion(&tasks, &models(), 0.5);
        assert_eq!(out.kept.len(), 13);
        assert_eq!(out.excluded.len(), 20);
    }

    #[test]
    fn test_full_completion_is_a_universal_quantifier() {
        let tasks = vec![
            baseline("all", &[("m1", 0.9, 1.0), ("m2", 0.9, 0.9), ("m3", 0.9, 0.5)]),
            baseline("one_zero", &[("m1", 0.9, 1.0), ("m2", 0.9, 1.0), ("m3", 0.9, 0.0)]),
        ];
        let out = filter_full_completion(&tasks, &models());
        assert_eq!(out.kept, vec!["all"]);
        assert!(out.excluded[0].reason.contains("m3"));
    }

    #[test]
    fn test_full_completion_monotone_under_added_model() {
        let tasks = vec![baseline(
            "t",
            &[("m1", 0.9, 1.0), ("m2", 0.9, 1.0), ("m3", 0.9, 0.0)],
        )];
        let two = filter_full_completion(&tasks, &models()[..2].to_vec());
        let three = filter_full_completion(&tasks, &models());
        assert_eq!(two.kept.len(), 1);
        // adding a reference model can only shrink the kept set
        assert!(three.kept.len() <= two.kept.len());
    }

    #[test]
    fn test_f2p_arity_filter() {
        use underspec_core::{Checkpoint, CheckpointKind};
        let mk = |id: &str, f2p: usize, p2p: usize| TaskRecord {
            task_id: id.to_string(),
            dataset_id: "swe".to_string(),
            prompt: "fix it".to_string(),
            checkpoint_spec: (0..f2p)
                .map(|i| Checkpoint {
                    id: format!("F{i}"),
                    description: String::new(),
                    kind: CheckpointKind::F2p,
                })
                .chain((0..p2p).map(|i| Checkpoint {
                    id: format!("P{i}"),
                    description: String::new(),
                    kind: CheckpointKind::P2p,
                }))
                .collect(),
            success_rule: SuccessRule::F2pNoRegression,
            outcome_domain: Default::default(),
            grounding_data: None,
        };
        let tasks = vec![mk("three_f2p", 3, 5), mk("two_f2p", 2, 9)];
        let out = filter_f2p_arity(&tasks, 3);
        assert_eq!(out.kept, vec!["three_f2p"]);
        assert!(out.excluded[0].reason.contains("only 2"));
    }

    // --- sampler ---

    fn verdicted(
        class: AmbiguityClass,
        parent: &str,
        dimension: Dimension,
        seg_count: usize,
        tag: usize,
    ) -> VerdictedVariant {
        let sub = match dimension {
            Dimension::Goal => Subdimension::Target,
            Dimension::Constraint => Subdimension::NumericBound,
            Dimension::Input => Subdimension::Identifier,
            Dimension::Context => Subdimension::Terminology,
        };
        let segments: Vec<Segment> = (0..seg_count)
            .map(|i| Segment {
                id: format!("S{}", i + 1),
                text: format!("text {i}"),
                value: format!("value {tag} {i}"),
                dimension,
                subdimension: sub,
                criticality: Level3Score::One,
                guessability: Level3Score::Zero,
                grounding: None,
            })
            .collect();
        let (n, c, unique_states) = match class {
            AmbiguityClass::Benign => (3, 3, 1),
            AmbiguityClass::Divergent => (3, 1, 2),
            _ => (3, 0, 2),
        };
        VerdictedVariant {
            variant: UnderspecifiedVariant {
                variant_id: format!("{parent}_V{tag}_{}", dimension.as_str()),
                parent_task_id: parent.to_string(),
                underspecified_prompt: "do the thing".to_string(),
                removed_segments: segments,
                strategy: RemovalStrategy::Delete,
                expected_questions: vec![ExpectedQuestions {
                    segment_id: "S1".to_string(),
                    questions: vec!["what exactly?".to_string()],
                }],
                expected_failure_mode: "guesses wrong".to_string(),
            },
            verdict: AmbiguityVerdict {
                class,
                n,
                c,
                unique_states,
                judge_result: None,
            },
            terminal_states: "[(0, 1), (1, 0)]".to_string(),
        }
    }

    fn tac_pool() -> Vec<VerdictedVariant> {
        // 146 outcome-critical, 54 divergent, 15 benign, spread over parents
        // and dimensions
        let dims = [
            Dimension::Goal,
            Dimension::Constraint,
            Dimension::Input,
            Dimension::Context,
        ];
        let mut pool = Vec::new();
        for i in 0..146 {
            pool.push(verdicted(
                AmbiguityClass::OutcomeCritical,
                &format!("task{}", i % 13),
                dims[i % 4],
                1 + i % 2,
                i,
            ));
        }
        for i in 0..54 {
            pool.push(verdicted(
                AmbiguityClass::Divergent,
                &format!("task{}", i % 13),
                dims[i % 4],
                1 + i % 2,
                1000 + i,
            ));
        }
        for i in 0..15 {
            pool.push(verdicted(
                AmbiguityClass::Benign,
                &format!("task{}", i % 5),
                dims[i % 4],
                1,
                2000 + i,
            ));
        }
        pool
    }

    fn tac_targets() -> BTreeMap<AmbiguityClass, usize> {
        BTreeMap::from([
            (AmbiguityClass::OutcomeCritical, 40),
            (AmbiguityClass::Divergent, 30),
            (AmbiguityClass::Benign, 30),
        ])
    }

    #[test]
    fn test_sampler_hits_targets_and_reports_shortfall() {
        let result = sample_to_distribution(&tac_pool(), &tac_targets(), 7).unwrap();
        assert_eq!(result.count_for(AmbiguityClass::OutcomeCritical), 40);
        assert_eq!(result.count_for(AmbiguityClass::Divergent), 30);
        assert_eq!(result.count_for(AmbiguityClass::Benign), 15);
        assert_eq!(
            result.shortfalls,
            BTreeMap::from([(AmbiguityClass::Benign, 15)])
        );
        assert_eq!(result.selected.len(), 85);
    }

    #[test]
    fn test_sampler_same_seed_same_selection() {
        let a = sample_to_distribution(&tac_pool(), &tac_targets(), 42).unwrap();
        let b = sample_to_distribution(&tac_pool(), &tac_targets(), 42).unwrap();
        assert_eq!(a, b);

        let c = sample_to_distribution(&tac_pool(), &tac_targets(), 43).unwrap();
        // same counts either way; the members may differ
        assert_eq!(c.count_for(AmbiguityClass::OutcomeCritical), 40);
        assert_eq!(c.count_for(AmbiguityClass::Divergent), 30);
    }

    #[test]
    fn test_sampler_spreads_across_parents() {
        // 13 parents with outcome-critical members; picking 40 must not
        // starve any parent that still has stock
        let result = sample_to_distribution(&tac_pool(), &tac_targets(), 3).unwrap();
        let mut per_parent: BTreeMap<&str, usize> = BTreeMap::new();
        for v in result
            .selected
            .iter()
            .filter(|v| v.verdict.class == AmbiguityClass::OutcomeCritical)
        {
            *per_parent.entry(v.variant.parent_task_id.as_str()).or_default() += 1;
        }
        assert_eq!(per_parent.len(), 13);
        let max = per_parent.values().max().unwrap();
        let min = per_parent.values().min().unwrap();
        assert!(max - min <= 1, "parent spread uneven: {per_parent:?}");
    }

    #[test]
    fn test_sampler_rejects_new_task_in_pool() {
        let mut pool = tac_pool();
        let mut nt = verdicted(AmbiguityClass::OutcomeCritical, "task0", Dimension::Goal, 1, 9999);
        nt.verdict.class = AmbiguityClass::NewTask;
        nt.verdict.unique_states = 1;
        nt.verdict.judge_result = Some(underspec_core::JudgeResult {
            task_completed: true,
            reasoning: "did a different task".to_string(),
        });
        pool.push(nt);
        assert!(matches!(
            sample_to_distribution(&pool, &tac_targets(), 1),
            Err(PipelineError::ContractViolation(_))
        ));
    }

    proptest! {
        #[test]
        fn prop_counts_never_exceed_targets(
            oc in 0usize..60,
            div in 0usize..60,
            ben in 0usize..60,
            t_oc in 0usize..50,
            t_div in 0usize..50,
            t_ben in 0usize..50,
            seed in any::<u64>(),
        ) {
            let mut pool = Vec::new();
            for i in 0..oc {
                pool.push(verdicted(AmbiguityClass::OutcomeCritical, &format!("p{}", i % 7), Dimension::Goal, 1, i));
            }
            for i in 0..div {
                pool.push(verdicted(AmbiguityClass::Divergent, &format!("p{}", i % 5), Dimension::Input, 2, 100 + i));
            }
            for i in 0..ben {
                pool.push(verdicted(AmbiguityClass::Benign, &format!("p{}", i % 3), Dimension::Constraint, 1, 200 + i));
            }
            let targets = BTreeMap::from([
                (AmbiguityClass::OutcomeCritical, t_oc),
                (AmbiguityClass::Divergent, t_div),
                (AmbiguityClass::Benign, t_ben),
            ]);
            let result = sample_to_distribution(&pool, &targets, seed).unwrap();
            prop_assert_eq!(result.count_for(AmbiguityClass::OutcomeCritical), t_oc.min(oc));
            prop_assert_eq!(result.count_for(AmbiguityClass::Divergent), t_div.min(div));
            prop_assert_eq!(result.count_for(AmbiguityClass::Benign), t_ben.min(ben));
            // no duplicate selections
            let mut ids: Vec<&str> = result.selected.iter().map(|v| v.variant.variant_id.as_str()).collect();
            ids.sort_unstable();
            ids.dedup();
            prop_assert_eq!(ids.len(), result.selected.len());
        }
    }

    // --- export ---

    fn task_for(parent: &str) -> TaskRecord {
        TaskRecord {
            task_id: parent.to_string(),
            dataset_id: "TheAgentCompany".to_string(),
            prompt: format!("original prompt of {parent}"),
            checkpoint_spec: Vec::new(),
            success_rule: SuccessRule::AllPass,
            outcome_domain: Default::default(),
            grounding_data: None,
        }
    }

    #[test]
    fn test_export_emits_public_schema_and_round_trips() {
        let sample = {
            let mut v = verdicted(AmbiguityClass::Benign, "hr_job_desc", Dimension::Goal, 1, 0);
            v.verdict = AmbiguityVerdict {
                class: AmbiguityClass::Benign,
                n: 3,
                c: 3,
                unique_states: 1,
                judge_result: None,
            };
            v.terminal_states = "[(1, 1)]".to_string();
            v
        };
        let tasks = BTreeMap::from([("hr_job_desc".to_string(), task_for("hr_job_desc"))]);
        let records = export_benchmark(&[sample], &tasks).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert_eq!(r.information_dimension, Dimension::Goal);
        assert_eq!(r.ambiguity_class, AmbiguityClass::Benign);
        assert_eq!(r.terminal_states, "[(1, 1)]");
        assert_eq!(r.dataset, "TheAgentCompany");

        // scores never leak into the public schema
        let text = render_benchmark(&records);
        assert!(!text.contains("criticality"));
        assert!(text.contains("\"ambiguity_class\": \"benign\""));

        let reparsed = parse_benchmark(&text).unwrap();
        assert_eq!(render_benchmark(&reparsed), text);
    }

    #[test]
    fn test_export_rejects_missing_questions() {
        let mut sample = verdicted(AmbiguityClass::Benign, "t", Dimension::Goal, 1, 0);
        sample.verdict = AmbiguityVerdict {
            class: AmbiguityClass::Benign,
            n: 3,
            c: 3,
            unique_states: 1,
            judge_result: None,
        };
        sample.variant.expected_questions.clear();
        let tasks = BTreeMap::from([("t".to_string(), task_for("t"))]);
        assert!(export_benchmark(&[sample], &tasks).is_err());
    }

    #[test]
    fn test_export_rejects_unknown_parent() {
        let sample = {
            let mut v = verdicted(AmbiguityClass::Benign, "ghost", Dimension::Goal, 1, 0);
            v.verdict.c = 3;
            v.verdict.n = 3;
            v.verdict.unique_states = 1;
            v
        };
        assert!(export_benchmark(&[sample], &BTreeMap::new()).is_err());
    }
}
