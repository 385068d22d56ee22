//! Bayesian self-supervised label-transition inference for graph node classifiers.
//!
//! A GCN or SGC classifier is trained on noisily annotated nodes. When sampled test
//! subgraphs are later perturbed, collapsed Gibbs sampling over a Dirichlet-smoothed
//! label-transition matrix infers labels for the subgraph nodes. In defense mode the
//! classifier is retrained on the inferred labels; in alert mode the drift of the
//! inferred transition matrix flags perturbed subgraphs.
//!
//! Modules follow the pipeline:
//!
//! - [`graph`]: data model, normalization, file format, SBM generator, partitions
//! - [`classifier`]: GCN/SGC forward pass, analytic gradients, Adam training, checkpoints
//! - [`perturb`]: label noise, dynamic subgraphs, the link-and-feature attack
//! - [`inference`]: transition matrices, Gibbs sampling, defense and alert runs
//! - [`eval`]: metrics, ROC, exact posterior, experiment drivers
//! - [`config`] and [`cli`]: experiment configuration and the command-line surface

pub mod classifier;
pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod graph;
pub mod inference;
pub mod manifest;
pub mod perturb;
pub mod seed;
pub mod sparse;

pub use error::{Error, Result};
