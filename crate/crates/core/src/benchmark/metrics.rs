use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::schema::NormalForm;

use super::score::TrialResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema: String,
    pub normal_form: NormalForm,
    pub anomaly_count: usize,
    pub trials_run: usize,
    pub trials_excluded: usize,
    /// Mean number of eliminated anomalies per scored trial.
    pub accuracy_mean: f64,
    /// Population standard deviation of the same.
    pub accuracy_std: f64,
    pub detection_rate: f64,
    pub elimination_rate: f64,
    pub attempts_histogram: BTreeMap<u32, usize>,
    pub mean_tokens: f64,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Mean and population standard deviation.
pub fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    let var = mean(&xs.iter().map(|x| (x - m) * (x - m)).collect::<Vec<_>>());
    (m, var.sqrt())
}

/// Folds scored trials into a report. `excluded` counts trials that ended in
/// a backend error and were not scored.
pub fn aggregate(
    schema: &str,
    normal_form: NormalForm,
    anomaly_count: usize,
    results: &[TrialResult],
    excluded: usize,
) -> MetricsReport {
    let accuracies: Vec<f64> = results.iter().map(|r| r.eliminated_count() as f64).collect();
    let (accuracy_mean, accuracy_std) = mean_and_std(&accuracies);
    let slots = results.len() * anomaly_count;
    let detected: usize = results.iter().map(TrialResult::detected_count).sum();
    let detection_rate = if slots == 0 { 0.0 } else { detected as f64 / slots as f64 };
    let full = results.iter().filter(|r| r.all_eliminated()).count();
    let elimination_rate = if results.is_empty() { 0.0 } else { full as f64 / results.len() as f64 };
    let mut attempts_histogram = BTreeMap::new();
    for r in results {
        *attempts_histogram.entry(r.attempts_used).or_insert(0) += 1;
    }
    let tokens: Vec<f64> = results.iter().map(|r| r.tokens_est as f64).collect();
    MetricsReport {
        schema: schema.to_string(),
        normal_form,
        anomaly_count,
        trials_run: results.len() + excluded,
        trials_excluded: excluded,
        accuracy_mean,
        accuracy_std,
        detection_rate,
        elimination_rate,
        attempts_histogram,
        mean_tokens: mean(&tokens),
    }
}
