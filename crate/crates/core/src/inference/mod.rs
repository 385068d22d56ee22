//! Label-transition models, collapsed Gibbs sampling, and the defense/alert inference loop.

mod gibbs;
mod run;
mod transition;

pub use gibbs::{gibbs_conditional, gibbs_sweep, InferenceState};
pub use run::{run_inference, run_inference_with_labels, InferenceConfig, InferenceOutcome, Mode, TraceRecord};
pub use transition::{
    alert_score, disagreement_score, warmup_transition, ConfusionCounts, TransitionModel,
};
