//! Collapsed Gibbs sampling of inferred labels with the transition matrix integrated out.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::run::Mode;
use super::transition::{ConfusionCounts, TransitionModel};
use crate::error::{Error, Result};

/// Sampler state for one inference run over `N` evaluation nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InferenceState {
    pub assignments: Vec<usize>,
    /// Per-node tallies of samples drawn after the warm-up sweeps.
    pub sample_counts: Vec<Vec<u64>>,
    pub epoch: usize,
    pub mode: Mode,
    pub ws: usize,
    pub epochs: usize,
    pub retrain_budget: usize,
}

impl InferenceState {
    pub fn new(initial: Vec<usize>, num_classes: usize, mode: Mode, ws: usize, epochs: usize, retrain_budget: usize) -> Self {
        let n = initial.len();
        InferenceState {
            assignments: initial,
            sample_counts: vec![vec![0; num_classes]; n],
            epoch: 0,
            mode,
            ws,
            epochs,
            retrain_budget,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.assignments.len()
    }

    /// Mode of the post-warm-up samples per node, lowest class on ties.
    pub fn posterior_mode(&self) -> Vec<usize> {
        self.sample_counts
            .iter()
            .map(|row| {
                let mut best = 0;
                for (k, &c) in row.iter().enumerate() {
                    if c > row[best] {
                        best = k;
                    }
                }
                best
            })
            .collect()
    }

    /// Empirical marginals of the post-warm-up samples.
    pub fn marginals(&self) -> Array2<f64> {
        let k = self.sample_counts.first().map_or(0, Vec::len);
        Array2::from_shape_fn((self.num_nodes(), k), |(n, c)| {
            let total: u64 = self.sample_counts[n].iter().sum();
            if total == 0 {
                0.0
            } else {
                self.sample_counts[n][c] as f64 / total as f64
            }
        })
    }
}

/// Normalized conditional over `z_n`:
/// `P̄(z_n = k) · (α_y + C¬n[k][y]) / Σ_k' (α_k' + C¬n[k][k'])`, computed in log space.
pub fn gibbs_conditional(
    class_probs: &[f64],
    noisy_label: usize,
    counts_excluding: &ConfusionCounts,
    alpha: &[f64],
) -> Result<Vec<f64>> {
    let k = class_probs.len();
    if alpha.len() != k || counts_excluding.num_classes() != k || noisy_label >= k {
        return Err(Error::dim("conditional inputs disagree on the class count"));
    }
    let alpha_sum: f64 = alpha.iter().sum();
    let log_w: Vec<f64> = (0..k)
        .map(|z| {
            class_probs[z].ln() + (alpha[noisy_label] + counts_excluding.get(z, noisy_label) as f64).ln()
                - (alpha_sum + counts_excluding.row_total(z) as f64).ln()
        })
        .collect();
    normalize_log_weights(&log_w)
}

fn normalize_log_weights(log_w: &[f64]) -> Result<Vec<f64>> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::invalid("all class probabilities are zero"));
    }
    let w: Vec<f64> = log_w.iter().map(|v| (v - max).exp()).collect();
    let s: f64 = w.iter().sum();
    Ok(w.into_iter().map(|v| v / s).collect())
}

fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    // Rounding can leave `acc` a hair below 1; fall back to the last positive weight.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// One sweep over all nodes in ascending order. `dynamic.counts` are the live counts
/// of `(assignment, noisy label)` pairs and must be consistent with `state` on entry.
/// With `use_warmup`, nodes are weighted by the frozen warm-up rows instead of the
/// leave-one-out counts; the live counts are still maintained.
pub fn gibbs_sweep<R: Rng + ?Sized>(
    state: &mut InferenceState,
    probs: &Array2<f64>,
    noisy_labels: &[usize],
    dynamic: &mut TransitionModel,
    use_warmup: bool,
    warmup: &TransitionModel,
    rng: &mut R,
) -> Result<()> {
    let n = state.num_nodes();
    let k = dynamic.num_classes();
    if probs.nrows() != n || noisy_labels.len() != n || probs.ncols() != k || warmup.num_classes() != k {
        return Err(Error::dim(format!(
            "sweep over {n} nodes got probs {:?}, {} noisy labels",
            probs.dim(),
            noisy_labels.len()
        )));
    }
    state.epoch += 1;
    let tally = state.epoch > state.ws;
    let warm_rows = use_warmup.then(|| warmup.rows());
    let mut weights = vec![0.0; k];
    for node in 0..n {
        let y = noisy_labels[node];
        let current = state.assignments[node];
        dynamic.counts.decrement(current, y);
        let row = probs.row(node);
        match &warm_rows {
            Some(rows) => {
                let log_w: Vec<f64> = (0..k).map(|z| row[z].ln() + rows[[z, y]].ln()).collect();
                weights = normalize_log_weights(&log_w)?;
            }
            None => {
                let p: Vec<f64> = row.to_vec();
                weights.clone_from(&gibbs_conditional(&p, y, &dynamic.counts, &dynamic.alpha)?);
            }
        }
        let z = sample_index(&weights, rng);
        state.assignments[node] = z;
        dynamic.counts.increment(z, y);
        if tally {
            state.sample_counts[node][z] += 1;
        }
    }
    Ok(())
}
