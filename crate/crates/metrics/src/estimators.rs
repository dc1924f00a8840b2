//! The individual metric estimators.

use crate::MetricsError;
use underspec_core::{CheckpointOutcome, TrialRecord};

/// Unbiased pass@k over n trials with c successes.
///
/// Computes `1 - C(n-c, k) / C(n, k)` in the multiplicative form
/// `1 - prod_{i=1..k} (n-c-k+i) / (n-k+i)`, which avoids large binomials.
/// When fewer than k failures exist every k-subset contains a success, so
/// the probability is exactly 1.
pub fn pass_at_k(n: u64, c: u64, k: u64) -> Result<f64, MetricsError> {
    if k == 0 || k > n {
        return Err(MetricsError::ContractViolation(format!(
            "pass@k requires 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    if c > n {
        return Err(MetricsError::ContractViolation(format!(
            "pass@k requires c <= n, got c={c}, n={n}"
        )));
    }
    if n - c < k {
        return Ok(1.0);
    }
    let mut product = 1.0;
    for i in 1..=k {
        product *= (n - c - k + i) as f64 / (n - k + i) as f64;
    }
    Ok(1.0 - product)
}

/// Mean fraction of checkpoint credit earned per trial.
///
/// Scalar outcomes contribute fractional credit; booleans contribute 0 or 1.
/// Errors on an empty trial set, an empty checkpoint tuple, or mixed arity.
pub fn checkpoint_accuracy(trials: &[TrialRecord]) -> Result<f64, MetricsError> {
    if trials.is_empty() {
        return Err(MetricsError::ContractViolation(
            "checkpoint accuracy over zero trials".into(),
        ));
    }
    let arity = trials[0].terminal_state.arity();
    if arity == 0 {
        return Err(MetricsError::ContractViolation(
            "checkpoint accuracy over empty checkpoint tuples".into(),
        ));
    }
    let mut sum = 0.0;
    for t in trials {
        if t.terminal_state.arity() != arity {
            return Err(MetricsError::ContractViolation(format!(
                "mixed checkpoint arity: {} vs {}",
                arity,
                t.terminal_state.arity()
            )));
        }
        let credit: f64 = t
            .terminal_state
            .outcomes()
            .iter()
            .map(CheckpointOutcome::credit)
            .sum();
        sum += credit / arity as f64;
    }
    Ok(sum / trials.len() as f64)
}

/// Fraction of trials that asked at least one question.
pub fn ask_rate(trials: &[TrialRecord]) -> Result<f64, MetricsError> {
    if trials.is_empty() {
        return Err(MetricsError::ContractViolation(
            "ask rate over zero trials".into(),
        ));
    }
    let asking = trials.iter().filter(|t| t.question_count() > 0).count();
    Ok(asking as f64 / trials.len() as f64)
}

/// Mean question count among trials that asked at all; 0.0 when none did.
pub fn avg_questions_per_asking_trajectory(trials: &[TrialRecord]) -> f64 {
    let asking: Vec<usize> = trials
        .iter()
        .map(TrialRecord::question_count)
        .filter(|&q| q > 0)
        .collect();
    if asking.is_empty() {
        return 0.0;
    }
    asking.iter().sum::<usize>() as f64 / asking.len() as f64
}

/// Total questions asked across all trials. This is the denominator basis
/// for gain-per-question, summed over raw counts rather than derived from
/// ask-rate times average, so it stays consistent with per-group question
/// totals.
pub fn total_questions(trials: &[TrialRecord]) -> u64 {
    trials.iter().map(|t| t.question_count() as u64).sum()
}

/// Performance improvement bought per question: `(with - without) / questions`.
/// Zero questions means zero gain attributed, by definition.
pub fn gain_per_question(metric_with: f64, metric_without: f64, total_questions: u64) -> f64 {
    if total_questions == 0 {
        return 0.0;
    }
    (metric_with - metric_without) / total_questions as f64
}
