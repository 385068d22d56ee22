//! Two-layer GCN and SGC node classifiers with hand-written gradients.

mod checkpoint;
mod model;
mod train;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, CheckpointHeader};
pub use model::{
    forward, loss_and_gradients, ClassifierParams, ModelInput, PredictionBundle, Variant,
};
pub use train::{retrain_step, train, Adam, Classifier, TrainConfig};
