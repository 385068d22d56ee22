//! Graph data model, normalization, ingestion, synthetic generation and partitioning.

mod io;
mod partition;
mod sbm;

pub use io::{load_graph, load_graph_dir, save_graph, GraphFiles, GraphMeta};
pub use partition::{partition_nodes, split_sizes, Partition};
pub use sbm::{generate_sbm, SbmConfig};

use std::collections::BTreeSet;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// An undirected attributed graph with optional ground-truth labels.
///
/// The adjacency is stored in CSR form with both directions of every edge and
/// no diagonal entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    num_classes: usize,
    adjacency: CsrMatrix,
    features: Array2<f64>,
    latent_labels: Option<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from undirected edges. Duplicate and reversed edges collapse
    /// to one undirected edge; self-loops are rejected.
    pub fn from_edges(
        num_classes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        features: Array2<f64>,
        latent_labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = features.nrows();
        let mut neighbors = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) has an endpoint outside [0, {n})"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop on node {u}")));
            }
            neighbors[u].insert(v);
            neighbors[v].insert(u);
        }
        Self::from_neighbor_sets(num_classes, &neighbors, features, latent_labels)
    }

    pub(crate) fn from_neighbor_sets(
        num_classes: usize,
        neighbors: &[BTreeSet<usize>],
        features: Array2<f64>,
        latent_labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = features.nrows();
        if neighbors.len() != n {
            return Err(Error::dim(format!(
                "{} adjacency rows for {} feature rows",
                neighbors.len(),
                n
            )));
        }
        if num_classes == 0 {
            return Err(Error::invalid("num_classes must be positive"));
        }
        if let Some((i, j)) = features
            .indexed_iter()
            .find(|(_, v)| !v.is_finite())
            .map(|(ix, _)| ix)
        {
            return Err(Error::invalid(format!("non-finite feature at ({i}, {j})")));
        }
        if let Some(labels) = &latent_labels {
            if labels.len() != n {
                return Err(Error::dim(format!("{} labels for {} nodes", labels.len(), n)));
            }
            if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= num_classes) {
                return Err(Error::invalid(format!(
                    "label {l} of node {i} is not below num_classes {num_classes}"
                )));
            }
        }
        let rows = neighbors
            .iter()
            .map(|set| set.iter().map(|&j| (j, 1.0)).collect())
            .collect();
        Ok(Graph {
            num_classes,
            adjacency: CsrMatrix::from_rows(n, rows),
            features,
            latent_labels,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.features.nrows()
    }

    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn adjacency(&self) -> &CsrMatrix {
        &self.adjacency
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn latent_labels(&self) -> Option<&[usize]> {
        self.latent_labels.as_deref()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        self.adjacency.row(i).0
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors(i).len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Number of stored directed entries, i.e. twice the undirected edge count.
    pub fn num_directed_edges(&self) -> usize {
        self.adjacency.nnz()
    }

    /// Undirected edges as `(lo, hi)` pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| j > i)
                .map(move |&j| (i, j))
        })
    }

    pub fn neighbor_sets(&self) -> Vec<BTreeSet<usize>> {
        (0..self.num_nodes())
            .map(|i| self.neighbors(i).iter().copied().collect())
            .collect()
    }

    /// Average degree over a set of nodes, counted in the full graph.
    pub fn average_degree(&self, nodes: &[usize]) -> f64 {
        if nodes.is_empty() {
            return 0.0;
        }
        nodes.iter().map(|&i| self.degree(i) as f64).sum::<f64>() / nodes.len() as f64
    }

    /// Induced subgraph on `nodes` (in the given order). Local index `i` maps to
    /// global node `nodes[i]`.
    pub fn induced(&self, nodes: &[usize]) -> Result<Graph> {
        let mut local = vec![usize::MAX; self.num_nodes()];
        for (i, &g) in nodes.iter().enumerate() {
            if g >= self.num_nodes() {
                return Err(Error::invalid(format!("node {g} out of range")));
            }
            if local[g] != usize::MAX {
                return Err(Error::invalid(format!("node {g} listed twice")));
            }
            local[g] = i;
        }
        let neighbors: Vec<BTreeSet<usize>> = nodes
            .iter()
            .map(|&g| {
                self.neighbors(g)
                    .iter()
                    .filter_map(|&h| (local[h] != usize::MAX).then_some(local[h]))
                    .collect()
            })
            .collect();
        let features = self.features.select(ndarray::Axis(0), nodes);
        let labels = self
            .latent_labels
            .as_ref()
            .map(|l| nodes.iter().map(|&g| l[g]).collect());
        Graph::from_neighbor_sets(self.num_classes, &neighbors, features, labels)
    }

    /// Replaces the adjacency and features, keeping classes and labels.
    pub(crate) fn with_structure(
        &self,
        neighbors: &[BTreeSet<usize>],
        features: Array2<f64>,
    ) -> Result<Graph> {
        Graph::from_neighbor_sets(
            self.num_classes,
            neighbors,
            features,
            self.latent_labels.clone(),
        )
    }

    /// True when every feature value is exactly 0 or 1.
    pub fn has_binary_features(&self) -> bool {
        self.features.iter().all(|&v| v == 0.0 || v == 1.0)
    }
}

/// The symmetric GCN propagation matrix `D̃^{-1/2} (A + I) D̃^{-1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedAdjacency {
    matrix: CsrMatrix,
}

impl NormalizedAdjacency {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn num_nodes(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn normalize_adjacency(graph: &Graph) -> NormalizedAdjacency {
    let n = graph.num_nodes();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|i| 1.0 / ((graph.degree(i) + 1) as f64).sqrt())
        .collect();
    let rows = (0..n)
        .map(|i| {
            let mut row: Vec<(usize, f64)> = graph
                .neighbors(i)
                .iter()
                .map(|&j| (j, inv_sqrt[i] * inv_sqrt[j]))
                .collect();
            row.push((i, inv_sqrt[i] * inv_sqrt[i]));
            row
        })
        .collect();
    NormalizedAdjacency {
        matrix: CsrMatrix::from_rows(n, rows),
    }
}
