use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gibbs::{gibbs_sweep, InferenceState};
use super::transition::{ConfusionCounts, TransitionModel};
use crate::classifier::{forward, retrain_step, Classifier, ModelInput, PredictionBundle};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Retrain the classifier on inferred labels after each post-warm-up sweep.
    Defense,
    /// Sample only; the classifier is never modified.
    Alert,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InferenceConfig {
    /// Warm-up sweeps that use the frozen warm-up transition.
    pub ws: usize,
    pub epochs: usize,
    /// Total number of retraining steps in defense mode.
    pub retrain: usize,
    pub alpha: f64,
    pub retrain_learning_rate: f64,
    /// When false every sweep uses the warm-up transition (fixed-φ ablation).
    pub dynamic_transition: bool,
    /// Regenerate the auto-labels from the retrained classifier after each retraining
    /// step instead of keeping the initial ones.
    pub refresh_auto_labels: bool,
    /// Start spending the retraining budget from the first warm-up sweep instead of
    /// after the warm-up.
    pub retrain_during_warmup: bool,
    pub trace: bool,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            ws: 40,
            epochs: 100,
            retrain: 60,
            alpha: 1.0,
            retrain_learning_rate: 1e-3,
            dynamic_transition: true,
            refresh_auto_labels: false,
            retrain_during_warmup: true,
            trace: false,
        }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ws >= self.epochs {
            return Err(Error::invalid(format!(
                "warm-up steps ({}) must be fewer than epochs ({})",
                self.ws, self.epochs
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha must be positive"));
        }
        if !(self.retrain_learning_rate >= 0.0 && self.retrain_learning_rate.is_finite()) {
            return Err(Error::invalid("retrain learning rate must be non-negative"));
        }
        Ok(())
    }
}

/// One line of the optional per-epoch trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub epoch: usize,
    pub phase: String,
    pub accuracy_vs_latent: Option<f64>,
    pub transition_rows: Vec<Vec<f64>>,
    pub retrained: bool,
}

#[derive(Clone, Debug)]
pub struct InferenceOutcome {
    /// Posterior mode of the post-warm-up samples, per evaluation node.
    pub inferred_labels: Vec<usize>,
    /// Assignment after the final sweep.
    pub last_sample: Vec<usize>,
    /// Auto-generated labels the sampler conditioned on (final values if refreshed).
    pub auto_labels: Vec<usize>,
    /// Predictions on the evaluation nodes before any retraining.
    pub initial_bundle: PredictionBundle,
    pub dynamic: TransitionModel,
    pub state: InferenceState,
    pub classifier: Classifier,
    pub retrain_steps: usize,
    pub trace: Vec<TraceRecord>,
}

fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / pred.len().max(1) as f64
}

/// Runs warm-up and dynamic Gibbs sampling over the evaluation nodes `targets` (local
/// indices into `view`), retraining a copy of the classifier in defense mode.
pub fn run_inference<R: Rng + ?Sized>(
    view: &Graph,
    targets: &[usize],
    classifier: &Classifier,
    mode: Mode,
    cfg: &InferenceConfig,
    warmup: &TransitionModel,
    rng: &mut R,
) -> Result<InferenceOutcome> {
    run_inference_with_labels(view, targets, classifier, mode, cfg, warmup, None, rng)
}

/// As [`run_inference`], but conditions on `auto_labels` (one per target) when given
/// instead of the classifier's argmax on `view`.
#[allow(clippy::too_many_arguments)]
pub fn run_inference_with_labels<R: Rng + ?Sized>(
    view: &Graph,
    targets: &[usize],
    classifier: &Classifier,
    mode: Mode,
    cfg: &InferenceConfig,
    warmup: &TransitionModel,
    auto_labels: Option<&[usize]>,
    rng: &mut R,
) -> Result<InferenceOutcome> {
    cfg.validate()?;
    let k = view.num_classes();
    if warmup.num_classes() != k {
        return Err(Error::dim("warm-up transition and graph disagree on the class count"));
    }
    if targets.is_empty() {
        return Err(Error::invalid("no evaluation nodes"));
    }
    if let Some(&t) = targets.iter().find(|&&t| t >= view.num_nodes()) {
        return Err(Error::invalid(format!("evaluation node {t} outside the view")));
    }
    let input = ModelInput::from_graph(view);
    let mut clf = classifier.clone();
    let initial_bundle = forward(&clf.params, &input)?.select(targets);
    let mut probs: Array2<f64> = initial_bundle.probs.clone();
    let mut auto_labels = match auto_labels {
        Some(given) => {
            if given.len() != targets.len() {
                return Err(Error::dim(format!(
                    "{} auto-generated labels for {} targets",
                    given.len(),
                    targets.len()
                )));
            }
            if given.iter().any(|&y| y >= k) {
                return Err(Error::invalid("auto-generated label out of range"));
            }
            given.to_vec()
        }
        None => initial_bundle.labels.clone(),
    };

    let mut state = InferenceState::new(auto_labels.clone(), k, mode, cfg.ws, cfg.epochs, cfg.retrain);
    let alpha = vec![cfg.alpha; k];
    let mut dynamic = TransitionModel::new(
        alpha,
        ConfusionCounts::from_pairs(k, &state.assignments, &auto_labels)?,
    )?;
    let latent: Option<Vec<usize>> = view
        .latent_labels()
        .map(|l| targets.iter().map(|&t| l[t]).collect());
    let mut view_labels = vec![0usize; view.num_nodes()];
    let mut retrain_steps = 0;
    let mut trace = Vec::new();

    for epoch in 1..=cfg.epochs {
        let warm_phase = epoch <= cfg.ws;
        let use_warmup = warm_phase || !cfg.dynamic_transition;
        gibbs_sweep(&mut state, &probs, &auto_labels, &mut dynamic, use_warmup, warmup, rng)?;

        let mut retrained = false;
        if mode == Mode::Defense && (!warm_phase || cfg.retrain_during_warmup) && retrain_steps < cfg.retrain {
            for (&t, &z) in targets.iter().zip(&state.assignments) {
                view_labels[t] = z;
            }
            retrain_step(&mut clf, &input, targets, &view_labels, cfg.retrain_learning_rate)?;
            retrain_steps += 1;
            retrained = true;
            let refreshed = forward(&clf.params, &input)?.select(targets);
            probs = refreshed.probs;
            if cfg.refresh_auto_labels {
                auto_labels = refreshed.labels;
                dynamic.counts = ConfusionCounts::from_pairs(k, &state.assignments, &auto_labels)?;
            }
        }

        if cfg.trace {
            let current = if state.epoch > state.ws {
                state.posterior_mode()
            } else {
                state.assignments.clone()
            };
            trace.push(TraceRecord {
                epoch,
                phase: if warm_phase { "warmup" } else { "dynamic" }.to_owned(),
                accuracy_vs_latent: latent.as_ref().map(|l| accuracy(&current, l)),
                transition_rows: dynamic.rows().outer_iter().map(|r| r.to_vec()).collect(),
                retrained,
            });
        }
    }

    Ok(InferenceOutcome {
        inferred_labels: state.posterior_mode(),
        last_sample: state.assignments.clone(),
        auto_labels,
        initial_bundle,
        dynamic,
        state,
        classifier: clf,
        retrain_steps,
        trace,
    })
}
