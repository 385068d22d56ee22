use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocReport {
    /// From `(0, 0)` at threshold `+inf` through every distinct score, descending.
    pub points: Vec<RocPoint>,
    pub auc: f64,
    /// `(score, is_positive)` inputs.
    pub labels: Vec<(f64, bool)>,
}

impl RocReport {
    pub fn points_csv(&self) -> String {
        let mut out = String::from("threshold,fpr,tpr\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", p.threshold, p.fpr, p.tpr));
        }
        out
    }
}

fn class_counts(scores: &[(f64, bool)]) -> Result<(u64, u64)> {
    let pos = scores.iter().filter(|s| s.1).count() as u64;
    let neg = scores.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass {
            positives: pos as usize,
            negatives: neg as usize,
        });
    }
    if scores.iter().any(|s| s.0.is_nan()) {
        return Err(Error::invalid("NaN score"));
    }
    Ok((pos, neg))
}

/// ROC curve by threshold sweep (positive when `score >= threshold`) with trapezoidal AUC.
pub fn roc_auc(scores: &[(f64, bool)]) -> Result<RocReport> {
    let (pos, neg) = class_counts(scores)?;
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    // Twice the area in units of (false positive × true positive) counts.
    let mut doubled_area: u64 = 0;
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].0;
        let (prev_tp, prev_fp) = (tp, fp);
        while i < sorted.len() && sorted[i].0 == threshold {
            if sorted[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        doubled_area += (fp - prev_fp) * (tp + prev_tp);
        points.push(RocPoint {
            threshold,
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
        });
    }
    Ok(RocReport {
        points,
        auc: doubled_area as f64 / (2 * pos * neg) as f64,
        labels: scores.to_vec(),
    })
}

/// Mann-Whitney statistic: the fraction of (positive, negative) pairs ordered
/// correctly, ties counting one half.
pub fn pair_statistic(scores: &[(f64, bool)]) -> Result<f64> {
    let (pos, neg) = class_counts(scores)?;
    let mut doubled: u64 = 0;
    for &(sp, _) in scores.iter().filter(|s| s.1) {
        for &(sn, _) in scores.iter().filter(|s| !s.1) {
            doubled += if sp > sn {
                2
            } else if sp == sn {
                1
            } else {
                0
            };
        }
    }
    Ok(doubled as f64 / (2 * pos * neg) as f64)
}
