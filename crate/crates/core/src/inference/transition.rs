use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `C[k][k']` = number of nodes whose inferred label is `k` and noisy label is `k'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    k: usize,
    table: Vec<u64>,
}

impl ConfusionCounts {
    pub fn zeros(num_classes: usize) -> Self {
        ConfusionCounts {
            k: num_classes,
            table: vec![0; num_classes * num_classes],
        }
    }

    pub fn from_pairs(num_classes: usize, inferred: &[usize], noisy: &[usize]) -> Result<Self> {
        if inferred.len() != noisy.len() {
            return Err(Error::dim(format!(
                "{} inferred labels vs {} noisy labels",
                inferred.len(),
                noisy.len()
            )));
        }
        let mut c = ConfusionCounts::zeros(num_classes);
        for (&z, &y) in inferred.iter().zip(noisy) {
            if z >= num_classes || y >= num_classes {
                return Err(Error::invalid(format!("label pair ({z}, {y}) not below {num_classes}")));
            }
            c.increment(z, y);
        }
        Ok(c)
    }

    pub fn from_table(table: &[Vec<u64>]) -> Self {
        let k = table.len();
        assert!(table.iter().all(|r| r.len() == k), "confusion table must be square");
        ConfusionCounts {
            k,
            table: table.concat(),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.k
    }

    pub fn get(&self, z: usize, y: usize) -> u64 {
        self.table[z * self.k + y]
    }

    pub fn row(&self, z: usize) -> &[u64] {
        &self.table[z * self.k..(z + 1) * self.k]
    }

    pub fn row_total(&self, z: usize) -> u64 {
        self.row(z).iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.table.iter().sum()
    }

    pub fn increment(&mut self, z: usize, y: usize) {
        self.table[z * self.k + y] += 1;
    }

    pub fn decrement(&mut self, z: usize, y: usize) {
        let cell = &mut self.table[z * self.k + y];
        *cell = cell
            .checked_sub(1)
            .expect("confusion count decremented below zero");
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.table.chunks(self.k).map(<[u64]>::to_vec).collect()
    }
}

/// A Dirichlet-smoothed label-transition matrix: row `k` is the posterior mean
/// `(α + C[k]) / Σ(α + C[k])` of the transition from inferred class `k` to noisy labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionModel {
    pub alpha: Vec<f64>,
    pub counts: ConfusionCounts,
}

impl TransitionModel {
    pub fn new(alpha: Vec<f64>, counts: ConfusionCounts) -> Result<Self> {
        if alpha.len() != counts.num_classes() {
            return Err(Error::dim(format!(
                "alpha has {} entries for {} classes",
                alpha.len(),
                counts.num_classes()
            )));
        }
        if alpha.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::invalid("Dirichlet prior entries must be positive"));
        }
        Ok(TransitionModel { alpha, counts })
    }

    pub fn uniform_prior(num_classes: usize, alpha: f64) -> Result<Self> {
        TransitionModel::new(vec![alpha; num_classes], ConfusionCounts::zeros(num_classes))
    }

    pub fn num_classes(&self) -> usize {
        self.alpha.len()
    }

    pub fn rows(&self) -> Array2<f64> {
        let k = self.num_classes();
        let alpha_sum: f64 = self.alpha.iter().sum();
        Array2::from_shape_fn((k, k), |(z, y)| {
            (self.alpha[y] + self.counts.get(z, y) as f64)
                / (alpha_sum + self.counts.row_total(z) as f64)
        })
    }
}

/// Transition model from classifier predictions on training nodes against their
/// manual labels.
pub fn warmup_transition(
    predictions: &[usize],
    manual_labels: &[usize],
    alpha: &[f64],
) -> Result<TransitionModel> {
    if predictions.is_empty() {
        return Err(Error::invalid("warm-up transition needs at least one node"));
    }
    let counts = ConfusionCounts::from_pairs(alpha.len(), predictions, manual_labels)?;
    TransitionModel::new(alpha.to_vec(), counts)
}

/// Mean over classes of the total-variation distance between corresponding rows.
pub fn alert_score(dynamic: &TransitionModel, warmup: &TransitionModel) -> Result<f64> {
    if dynamic.num_classes() != warmup.num_classes() {
        return Err(Error::dim("transition models disagree on the class count"));
    }
    Ok(rows_drift(&dynamic.rows(), &warmup.rows()))
}

pub(crate) fn rows_drift(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    let k = a.nrows();
    let tv: f64 = a
        .outer_iter()
        .zip(b.outer_iter())
        .map(|(ra, rb)| 0.5 * ra.iter().zip(rb).map(|(x, y)| (x - y).abs()).sum::<f64>())
        .sum();
    tv / k as f64
}

/// Fraction of nodes whose inferred label differs from the auto-generated label.
pub fn disagreement_score(inferred: &[usize], auto_labels: &[usize]) -> f64 {
    if inferred.is_empty() {
        return 0.0;
    }
    let diff = inferred.iter().zip(auto_labels).filter(|(a, b)| a != b).count();
    diff as f64 / inferred.len() as f64
}
