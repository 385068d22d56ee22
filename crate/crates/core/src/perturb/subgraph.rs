use rand::seq::SliceRandom;

use super::attack::AttackRecord;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

/// A sampled group of test nodes together with the graph it is evaluated on.
///
/// `graph_view` is induced on `node_ids` followed by `context_ids`: local index
/// `i < node_ids.len()` is the evaluation node `node_ids[i]`, the remaining local
/// indices are context nodes that are visible but never victims.
#[derive(Clone, Debug)]
pub struct DynamicSubgraph {
    pub node_ids: Vec<usize>,
    pub context_ids: Vec<usize>,
    pub graph_view: Graph,
    pub perturbed: bool,
    pub attack_log: Vec<AttackRecord>,
    /// Flips that were budgeted but had no remaining candidate.
    pub attack_shortfall: usize,
}

impl DynamicSubgraph {
    pub fn new(full: &Graph, node_ids: Vec<usize>, context_ids: Vec<usize>) -> Result<Self> {
        let order: Vec<usize> = node_ids.iter().chain(&context_ids).copied().collect();
        let graph_view = full.induced(&order)?;
        Ok(DynamicSubgraph {
            node_ids,
            context_ids,
            graph_view,
            perturbed: false,
            attack_log: Vec::new(),
            attack_shortfall: 0,
        })
    }

    /// Local indices of the evaluation nodes.
    pub fn targets(&self) -> Vec<usize> {
        (0..self.node_ids.len()).collect()
    }

    pub fn global_id(&self, local: usize) -> usize {
        if local < self.node_ids.len() {
            self.node_ids[local]
        } else {
            self.context_ids[local - self.node_ids.len()]
        }
    }

    /// Latent labels of the evaluation nodes, when the graph carries them.
    pub fn target_labels(&self) -> Option<Vec<usize>> {
        self.graph_view
            .latent_labels()
            .map(|l| l[..self.node_ids.len()].to_vec())
    }

    /// Attack log as JSON lines.
    pub fn attack_log_jsonl(&self) -> String {
        self.attack_log
            .iter()
            .map(|r| serde_json::to_string(r).expect("attack record serializes") + "\n")
            .collect()
    }
}

/// `round(x)` with halves rounded up, for non-negative `x`.
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5 + 1e-9).floor() as usize
}

/// Draws `count` subgraphs of `round(fraction * |test|)` test nodes each. Subgraph `i`
/// (1-based) is sampled with seed `seed + i`. `context_ids` are attached to every view.
pub fn sample_subgraphs(
    graph: &Graph,
    test_ids: &[usize],
    context_ids: &[usize],
    fraction: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<DynamicSubgraph>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!("subgraph fraction {fraction} outside (0, 1]")));
    }
    let size = round_half_up(fraction * test_ids.len() as f64).min(test_ids.len());
    if size < 1 {
        return Err(Error::invalid("subgraph would contain no nodes"));
    }
    (1..=count as u64)
        .map(|i| {
            let mut rng = seed::rng_from_seed(seed.wrapping_add(i));
            let mut nodes: Vec<usize> = test_ids.choose_multiple(&mut rng, size).copied().collect();
            nodes.sort_unstable();
            DynamicSubgraph::new(graph, nodes, context_ids.to_vec())
        })
        .collect()
}
