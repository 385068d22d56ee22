use ndarray::{Array2, ArrayView2, Axis, Zip};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{normalize_adjacency, Graph, NormalizedAdjacency};
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Gcn,
    Sgc,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Gcn => "gcn",
            Variant::Sgc => "sgc",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gcn" => Ok(Variant::Gcn),
            "sgc" => Ok(Variant::Sgc),
            other => Err(Error::invalid(format!("unknown classifier variant {other:?}"))),
        }
    }
}

/// Classifier weights. GCN holds `[W0 (d×h), W1 (h×K)]`, SGC holds `[W (d×K)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierParams {
    pub variant: Variant,
    pub weights: Vec<Array2<f64>>,
    pub sgc_hops: usize,
}

impl ClassifierParams {
    /// Glorot-uniform initialization, bound `sqrt(6 / (fan_in + fan_out))`.
    pub fn glorot<R: Rng>(
        variant: Variant,
        num_features: usize,
        hidden: usize,
        num_classes: usize,
        sgc_hops: usize,
        rng: &mut R,
    ) -> Self {
        let shapes = match variant {
            Variant::Gcn => vec![(num_features, hidden), (hidden, num_classes)],
            Variant::Sgc => vec![(num_features, num_classes)],
        };
        let weights = shapes
            .into_iter()
            .map(|(r, c)| {
                let bound = (6.0 / (r + c) as f64).sqrt();
                Array2::from_shape_simple_fn((r, c), || rng.gen_range(-bound..=bound))
            })
            .collect();
        ClassifierParams {
            variant,
            weights,
            sgc_hops,
        }
    }

    pub fn zeros(variant: Variant, num_features: usize, hidden: usize, num_classes: usize) -> Self {
        let weights = match variant {
            Variant::Gcn => vec![
                Array2::zeros((num_features, hidden)),
                Array2::zeros((hidden, num_classes)),
            ],
            Variant::Sgc => vec![Array2::zeros((num_features, num_classes))],
        };
        ClassifierParams {
            variant,
            weights,
            sgc_hops: 2,
        }
    }

    pub fn num_features(&self) -> usize {
        self.weights[0].nrows()
    }

    pub fn num_classes(&self) -> usize {
        self.weights.last().unwrap().ncols()
    }

    /// Product of all weight matrices, the linear map used by the attack surrogate.
    pub fn collapsed_weights(&self) -> Array2<f64> {
        let mut acc = self.weights[0].clone();
        for w in &self.weights[1..] {
            acc = acc.dot(w);
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
    }

    fn check_shapes(&self, input: &ModelInput) -> Result<()> {
        let expected = match self.variant {
            Variant::Gcn => 2,
            Variant::Sgc => 1,
        };
        if self.weights.len() != expected {
            return Err(Error::dim(format!(
                "{} expects {expected} weight matrices, found {}",
                self.variant,
                self.weights.len()
            )));
        }
        if self.weights[0].nrows() != input.features.ncols() {
            return Err(Error::dim(format!(
                "first weight has {} rows for {} features",
                self.weights[0].nrows(),
                input.features.ncols()
            )));
        }
        for pair in self.weights.windows(2) {
            if pair[0].ncols() != pair[1].nrows() {
                return Err(Error::dim("consecutive weight shapes disagree"));
            }
        }
        Ok(())
    }
}

/// Propagation matrix and features for one graph, with the SGC propagation cached.
#[derive(Clone, Debug)]
pub struct ModelInput {
    adj: NormalizedAdjacency,
    features: Array2<f64>,
    sparse_features: CsrMatrix,
    sgc_cache: std::cell::OnceCell<(usize, Array2<f64>)>,
}

impl ModelInput {
    pub fn new(adj: NormalizedAdjacency, features: Array2<f64>) -> Result<Self> {
        if adj.num_nodes() != features.nrows() {
            return Err(Error::dim(format!(
                "adjacency has {} nodes, features {} rows",
                adj.num_nodes(),
                features.nrows()
            )));
        }
        let sparse_features = CsrMatrix::from_dense(features.view());
        Ok(ModelInput {
            adj,
            features,
            sparse_features,
            sgc_cache: Default::default(),
        })
    }

    pub fn from_graph(graph: &Graph) -> Self {
        ModelInput::new(normalize_adjacency(graph), graph.features().clone())
            .expect("graph shapes are consistent")
    }

    pub fn adjacency(&self) -> &NormalizedAdjacency {
        &self.adj
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn num_nodes(&self) -> usize {
        self.features.nrows()
    }

    /// `Â^hops X`, computed once.
    pub fn propagated_features(&self, hops: usize) -> &Array2<f64> {
        let (cached_hops, s) = self.sgc_cache.get_or_init(|| {
            let mut s = self.features.clone();
            for _ in 0..hops {
                s = self.adj.matrix().mul_dense(s.view());
            }
            (hops, s)
        });
        assert_eq!(*cached_hops, hops, "model input cached for a different hop count");
        s
    }

    fn features_times(&self, w: ArrayView2<'_, f64>) -> Array2<f64> {
        self.sparse_features.mul_dense(w)
    }
}

/// Class probabilities and argmax labels for every node.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionBundle {
    pub probs: Array2<f64>,
    pub labels: Vec<usize>,
}

impl PredictionBundle {
    pub fn from_probs(probs: Array2<f64>) -> Self {
        let labels = probs.outer_iter().map(|r| argmax(r.iter().copied())).collect();
        PredictionBundle { probs, labels }
    }

    pub fn num_nodes(&self) -> usize {
        self.probs.nrows()
    }

    pub fn num_classes(&self) -> usize {
        self.probs.ncols()
    }

    /// Rows of `probs` and `labels` for the given nodes.
    pub fn select(&self, nodes: &[usize]) -> PredictionBundle {
        PredictionBundle {
            probs: self.probs.select(Axis(0), nodes),
            labels: nodes.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Index of the largest value; the lowest index wins ties.
pub(crate) fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

struct Activations {
    hidden_pre: Option<Array2<f64>>,
    hidden: Option<Array2<f64>>,
    logits: Array2<f64>,
}

fn check_finite(m: &Array2<f64>, layer: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { layer })
    }
}

fn activations(params: &ClassifierParams, input: &ModelInput) -> Result<Activations> {
    params.check_shapes(input)?;
    let adj = input.adj.matrix();
    match params.variant {
        Variant::Gcn => {
            let xw = input.features_times(params.weights[0].view());
            let hidden_pre = adj.mul_dense(xw.view());
            check_finite(&hidden_pre, "hidden layer")?;
            let hidden = hidden_pre.mapv(|v| v.max(0.0));
            let hw = hidden.dot(&params.weights[1]);
            let logits = adj.mul_dense(hw.view());
            check_finite(&logits, "output layer")?;
            Ok(Activations {
                hidden_pre: Some(hidden_pre),
                hidden: Some(hidden),
                logits,
            })
        }
        Variant::Sgc => {
            let s = input.propagated_features(params.sgc_hops);
            let logits = s.dot(&params.weights[0]);
            check_finite(&logits, "output layer")?;
            Ok(Activations {
                hidden_pre: None,
                hidden: None,
                logits,
            })
        }
    }
}

/// Row-wise log-softmax via log-sum-exp.
fn log_softmax(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.outer_iter_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        row.mapv_inplace(|v| v - lse);
    }
    out
}

/// Class probabilities `softmax(Â ReLU(Â X W0) W1)` (GCN) or `softmax(Â^hops X W)` (SGC).
pub fn forward(params: &ClassifierParams, input: &ModelInput) -> Result<PredictionBundle> {
    let act = activations(params, input)?;
    let probs = log_softmax(&act.logits).mapv(f64::exp);
    Ok(PredictionBundle::from_probs(probs))
}

/// Mean cross-entropy over `mask` and its exact gradient with respect to every weight.
/// `labels` is indexed by node id.
pub fn loss_and_gradients(
    params: &ClassifierParams,
    input: &ModelInput,
    labels: &[usize],
    mask: &[usize],
) -> Result<(f64, Vec<Array2<f64>>)> {
    if mask.is_empty() {
        return Err(Error::invalid("loss mask is empty"));
    }
    if labels.len() != input.num_nodes() {
        return Err(Error::dim(format!(
            "{} labels for {} nodes",
            labels.len(),
            input.num_nodes()
        )));
    }
    let k = params.num_classes();
    let act = activations(params, input)?;
    let logp = log_softmax(&act.logits);
    let scale = 1.0 / mask.len() as f64;

    let mut loss = 0.0;
    let mut d_logits = Array2::<f64>::zeros(act.logits.raw_dim());
    for &n in mask {
        let y = labels[n];
        if y >= k {
            return Err(Error::invalid(format!("label {y} of node {n} not below {k}")));
        }
        loss -= logp[[n, y]] * scale;
        let mut row = d_logits.row_mut(n);
        Zip::from(&mut row)
            .and(&logp.row(n))
            .for_each(|d, &lp| *d += lp.exp() * scale);
        row[y] -= scale;
    }

    let adj = input.adj.matrix();
    let grads = match params.variant {
        Variant::Gcn => {
            let hidden = act.hidden.as_ref().unwrap();
            let hidden_pre = act.hidden_pre.as_ref().unwrap();
            // Â is symmetric, so Âᵀ G = Â G.
            let d_hw = adj.mul_dense(d_logits.view());
            let d_w1 = hidden.t().dot(&d_hw);
            let mut d_hidden = d_hw.dot(&params.weights[1].t());
            Zip::from(&mut d_hidden)
                .and(hidden_pre)
                .for_each(|g, &z| {
                    if z <= 0.0 {
                        *g = 0.0;
                    }
                });
            let d_xw = adj.mul_dense(d_hidden.view());
            let d_w0 = input.sparse_features.transpose_mul_dense(d_xw.view());
            vec![d_w0, d_w1]
        }
        Variant::Sgc => {
            let s = input.propagated_features(params.sgc_hops);
            vec![s.t().dot(&d_logits)]
        }
    };
    if !loss.is_finite() {
        return Err(Error::NonFinite { layer: "loss" });
    }
    Ok((loss, grads))
}
