//! Greedy direct evasion attack on links and features.
//!
//! Each victim is attacked against a linearized surrogate that shares the victim
//! classifier's weights: `logits = Â^h X W` with `W` the product of the weight
//! matrices (`h = 2` for GCN, the SGC hop count otherwise). Every greedy step scores
//! all remaining single flips by exact re-evaluation of the surrogate loss
//! `-ln softmax(logits[n])[y_pred(n)]` and applies the best one.

use std::collections::{BTreeMap, BTreeSet};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::subgraph::DynamicSubgraph;
use crate::classifier::{forward, ClassifierParams, ModelInput, Variant};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    /// Toggle 0/1 feature bits.
    Binary,
    /// Move a continuous feature by `±epsilon`, sign following the surrogate gradient.
    Shift,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttackConfig {
    /// Edge flips per victim; feature flips are `n_pert * feature_multiplier`.
    pub n_pert: usize,
    pub feature_multiplier: usize,
    /// `None` picks binary toggling when every feature is 0 or 1.
    pub feature_mode: Option<FeatureMode>,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            n_pert: 2,
            feature_multiplier: 10,
            feature_mode: None,
            epsilon: 1.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    Edge,
    Feature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackOp {
    Add,
    Remove,
    Toggle,
    Shift,
}

/// One applied flip. Node ids are global; `score` is the surrogate loss after the flip.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackRecord {
    pub victim: usize,
    pub kind: AttackKind,
    pub target: usize,
    pub op: AttackOp,
    pub score: f64,
}

struct Surrogate {
    neighbors: Vec<BTreeSet<usize>>,
    features: Array2<f64>,
    weights: Array2<f64>,
    /// `X W`, kept in sync with `features`.
    projected: Array2<f64>,
    hops: usize,
}

impl Surrogate {
    fn norm(&self, i: usize, j: usize) -> f64 {
        let di = (self.neighbors[i].len() + 1) as f64;
        let dj = (self.neighbors[j].len() + 1) as f64;
        1.0 / (di * dj).sqrt()
    }

    /// Row `n` of `Â^hops` as a sparse map.
    fn propagation_row(&self, n: usize) -> BTreeMap<usize, f64> {
        let mut row = BTreeMap::from([(n, 1.0)]);
        for _ in 0..self.hops {
            let mut next = BTreeMap::new();
            for (&m, &w) in &row {
                *next.entry(m).or_insert(0.0) += w * self.norm(m, m);
                for &j in &self.neighbors[m] {
                    *next.entry(j).or_insert(0.0) += w * self.norm(m, j);
                }
            }
            row = next;
        }
        row
    }

    fn logits_from_row(&self, row: &BTreeMap<usize, f64>) -> Array1<f64> {
        let mut out = Array1::zeros(self.projected.ncols());
        for (&j, &w) in row {
            out.scaled_add(w, &self.projected.row(j));
        }
        out
    }

    fn logits(&self, n: usize) -> Array1<f64> {
        self.logits_from_row(&self.propagation_row(n))
    }

    fn toggle_edge(&mut self, a: usize, b: usize) -> AttackOp {
        if self.neighbors[a].remove(&b) {
            self.neighbors[b].remove(&a);
            AttackOp::Remove
        } else {
            self.neighbors[a].insert(b);
            self.neighbors[b].insert(a);
            AttackOp::Add
        }
    }

    fn set_feature(&mut self, n: usize, j: usize, value: f64) {
        let delta = value - self.features[[n, j]];
        self.features[[n, j]] = value;
        let w = self.weights.row(j).to_owned();
        self.projected.row_mut(n).scaled_add(delta, &w);
    }
}

/// Losses closer than this (relative) count as tied, so rounding in the propagation
/// order cannot override the tie rules.
const TIE_TOLERANCE: f64 = 1e-9;

fn beats(candidate: f64, incumbent: f64) -> bool {
    candidate > incumbent + TIE_TOLERANCE * incumbent.abs().max(1.0)
}

fn surrogate_loss(logits: &Array1<f64>, label: usize) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    lse - logits[label]
}

fn softmax(logits: &Array1<f64>) -> Array1<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e = logits.mapv(|v| (v - max).exp());
    let s = e.sum();
    e / s
}

/// Attacks every evaluation node of `subgraph` in ascending id order and returns the
/// perturbed subgraph. The classifier is only read.
pub fn attack_lf(
    subgraph: &DynamicSubgraph,
    victim_params: &ClassifierParams,
    cfg: &AttackConfig,
) -> Result<DynamicSubgraph> {
    let view = &subgraph.graph_view;
    let mode = cfg.feature_mode.unwrap_or(if view.has_binary_features() {
        FeatureMode::Binary
    } else {
        FeatureMode::Shift
    });
    let predicted = forward(victim_params, &ModelInput::from_graph(view))?.labels;
    let weights = victim_params.collapsed_weights();
    let projected = view.features().dot(&weights);
    let mut s = Surrogate {
        neighbors: view.neighbor_sets(),
        features: view.features().clone(),
        weights,
        projected,
        hops: match victim_params.variant {
            Variant::Gcn => 2,
            Variant::Sgc => victim_params.sgc_hops,
        },
    };

    let mut log = Vec::new();
    let mut shortfall = 0;
    let n_view = view.num_nodes();
    let d = view.num_features();
    for victim in subgraph.targets() {
        let label = predicted[victim];
        let mut edge_budget = cfg.n_pert;
        let mut feature_budget = cfg.n_pert * cfg.feature_multiplier;
        let mut edge_used = vec![false; n_view];
        edge_used[victim] = true;
        let mut feature_used = vec![false; d];

        while edge_budget + feature_budget > 0 {
            let mut best_edge: Option<(usize, f64)> = None;
            if edge_budget > 0 {
                for u in 0..n_view {
                    if edge_used[u] {
                        continue;
                    }
                    s.toggle_edge(victim, u);
                    let loss = surrogate_loss(&s.logits(victim), label);
                    s.toggle_edge(victim, u);
                    if best_edge.map_or(true, |(_, b)| beats(loss, b)) {
                        best_edge = Some((u, loss));
                    }
                }
            }

            let mut best_feature: Option<(usize, f64, f64)> = None;
            if feature_budget > 0 {
                let row = s.propagation_row(victim);
                let self_weight = row.get(&victim).copied().unwrap_or(0.0);
                let base = s.logits_from_row(&row);
                let mut grad_logits = softmax(&base);
                grad_logits[label] -= 1.0;
                for j in 0..d {
                    if feature_used[j] {
                        continue;
                    }
                    let current = s.features[[victim, j]];
                    let new_value = match mode {
                        FeatureMode::Binary => 1.0 - current,
                        FeatureMode::Shift => {
                            let g = self_weight * s.weights.row(j).dot(&grad_logits);
                            if g >= 0.0 {
                                current + cfg.epsilon
                            } else {
                                current - cfg.epsilon
                            }
                        }
                    };
                    let delta = new_value - current;
                    let mut logits = base.clone();
                    logits.scaled_add(self_weight * delta, &s.weights.row(j));
                    let loss = surrogate_loss(&logits, label);
                    if best_feature.map_or(true, |(_, _, b)| beats(loss, b)) {
                        best_feature = Some((j, new_value, loss));
                    }
                }
            }

            let take_edge = match (best_edge, best_feature) {
                (Some((_, le)), Some((_, _, lf))) => !beats(lf, le),
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => {
                    shortfall += edge_budget + feature_budget;
                    break;
                }
            };
            if take_edge {
                let (u, loss) = best_edge.unwrap();
                let op = s.toggle_edge(victim, u);
                edge_used[u] = true;
                edge_budget -= 1;
                log.push(AttackRecord {
                    victim: subgraph.global_id(victim),
                    kind: AttackKind::Edge,
                    target: subgraph.global_id(u),
                    op,
                    score: loss,
                });
            } else {
                let (j, value, loss) = best_feature.unwrap();
                s.set_feature(victim, j, value);
                feature_used[j] = true;
                feature_budget -= 1;
                log.push(AttackRecord {
                    victim: subgraph.global_id(victim),
                    kind: AttackKind::Feature,
                    target: j,
                    op: match mode {
                        FeatureMode::Binary => AttackOp::Toggle,
                        FeatureMode::Shift => AttackOp::Shift,
                    },
                    score: loss,
                });
            }
            // One side may run out of candidates while the other still has budget.
            if best_edge.is_none() && edge_budget > 0 {
                shortfall += edge_budget;
                edge_budget = 0;
            }
            if best_feature.is_none() && feature_budget > 0 {
                shortfall += feature_budget;
                feature_budget = 0;
            }
        }
    }

    let graph_view = view.with_structure(&s.neighbors, s.features)?;
    Ok(DynamicSubgraph {
        node_ids: subgraph.node_ids.clone(),
        context_ids: subgraph.context_ids.clone(),
        graph_view,
        perturbed: subgraph.perturbed || !log.is_empty(),
        attack_log: subgraph.attack_log.iter().cloned().chain(log).collect(),
        attack_shortfall: subgraph.attack_shortfall + shortfall,
    })
}
