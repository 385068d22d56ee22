use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracy and confusion of predicted against reference labels, plus timing.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    /// `confusion[reference][predicted]`.
    pub confusion: Vec<Vec<u64>>,
    pub per_class_recall: Vec<f64>,
    /// Wall-clock fields are kept out of serialized reports unless set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
    /// Seconds per 100 evaluated nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_runtime: Option<f64>,
}

impl MetricsReport {
    pub fn evaluated(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }

    pub fn with_runtime(mut self, seconds: f64) -> Self {
        self.runtime_seconds = Some(seconds);
        let n = self.evaluated();
        self.unit_runtime = Some(if n == 0 { 0.0 } else { seconds * 100.0 / n as f64 });
        self
    }

    pub fn without_runtime(mut self) -> Self {
        self.runtime_seconds = None;
        self.unit_runtime = None;
        self
    }

    /// Confusion matrix as CSV of `ln(1 + count)`, one row per reference class.
    pub fn log_heatmap_csv(&self) -> String {
        self.confusion
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&c| format!("{}", (c as f64).ln_1p()))
                    .collect::<Vec<_>>()
                    .join(",")
                    + "\n"
            })
            .collect()
    }
}

pub fn compute_metrics(predicted: &[usize], reference: &[usize], num_classes: usize) -> Result<MetricsReport> {
    if predicted.len() != reference.len() {
        return Err(Error::dim(format!(
            "{} predictions for {} references",
            predicted.len(),
            reference.len()
        )));
    }
    let mut confusion = vec![vec![0u64; num_classes]; num_classes];
    for (&p, &r) in predicted.iter().zip(reference) {
        if p >= num_classes || r >= num_classes {
            return Err(Error::invalid(format!("label pair ({p}, {r}) not below {num_classes}")));
        }
        confusion[r][p] += 1;
    }
    let correct: u64 = (0..num_classes).map(|k| confusion[k][k]).sum();
    let accuracy = if predicted.is_empty() {
        0.0
    } else {
        correct as f64 / predicted.len() as f64
    };
    let per_class_recall = confusion
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let total: u64 = row.iter().sum();
            if total == 0 {
                0.0
            } else {
                row[k] as f64 / total as f64
            }
        })
        .collect();
    Ok(MetricsReport {
        accuracy,
        confusion,
        per_class_recall,
        runtime_seconds: None,
        unit_runtime: None,
    })
}

/// Mean and sample standard deviation (n − 1 denominator; 0 for a single value).
pub fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
