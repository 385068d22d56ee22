use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::seed;

/// Parameters of a stochastic block model with block-indicator Bernoulli features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SbmConfig {
    pub num_nodes: usize,
    pub num_blocks: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub num_features: usize,
    pub q_on: f64,
    pub q_off: f64,
    pub seed: u64,
}

impl SbmConfig {
    /// The desk-scale two-block configuration used throughout the experiments.
    pub fn desk(seed: u64) -> Self {
        SbmConfig {
            num_nodes: 400,
            num_blocks: 2,
            p_in: 0.2,
            p_out: 0.01,
            num_features: 40,
            q_on: 0.8,
            q_off: 0.05,
            seed,
        }
    }
}

/// Samples an SBM graph. Node `i` belongs to block `i % num_blocks`; block `b` owns
/// feature columns `[b*m, (b+1)*m)` with `m = d / num_blocks`. Owned columns are on
/// with probability `q_on`, all other columns with `q_off`. Latent labels are block ids.
pub fn generate_sbm(cfg: &SbmConfig) -> Result<Graph> {
    for (name, p) in [
        ("p_in", cfg.p_in),
        ("p_out", cfg.p_out),
        ("q_on", cfg.q_on),
        ("q_off", cfg.q_off),
    ] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("{name}={p} is not a probability")));
        }
    }
    if cfg.num_blocks == 0 {
        return Err(Error::invalid("num_blocks must be positive"));
    }
    if cfg.p_in <= cfg.p_out {
        return Err(Error::invalid("p_in must exceed p_out"));
    }
    if cfg.q_on <= cfg.q_off {
        return Err(Error::invalid("q_on must exceed q_off"));
    }
    let n = cfg.num_nodes;
    let block = |i: usize| i % cfg.num_blocks;
    let mut rng = seed::rng_from_seed(cfg.seed);

    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if block(i) == block(j) { cfg.p_in } else { cfg.p_out };
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }

    let per_block = cfg.num_features / cfg.num_blocks;
    let mut features = Array2::<f64>::zeros((n, cfg.num_features));
    for i in 0..n {
        let own = block(i) * per_block..(block(i) + 1) * per_block;
        for j in 0..cfg.num_features {
            let q = if own.contains(&j) { cfg.q_on } else { cfg.q_off };
            if rng.gen::<f64>() < q {
                features[[i, j]] = 1.0;
            }
        }
    }
    let labels = (0..n).map(block).collect();
    Graph::from_edges(cfg.num_blocks, edges, features, Some(labels))
}
