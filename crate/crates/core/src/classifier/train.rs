use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use super::model::{loss_and_gradients, ClassifierParams, ModelInput, Variant};
use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::seed;

/// Training hyper-parameters. Dropout and weight decay are recorded for
/// reproducibility and must stay zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub variant: Variant,
    pub epochs: usize,
    pub learning_rate: f64,
    pub hidden: usize,
    pub sgc_hops: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub dropout: f64,
    pub weight_decay: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            variant: Variant::Gcn,
            epochs: 200,
            learning_rate: 1e-3,
            hidden: 200,
            sgc_hops: 2,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            dropout: 0.0,
            weight_decay: 0.0,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if self.variant == Variant::Gcn && self.hidden == 0 {
            return Err(Error::invalid("hidden must be positive"));
        }
        if self.dropout != 0.0 || self.weight_decay != 0.0 {
            return Err(Error::invalid("dropout and weight decay are not supported"));
        }
        Ok(())
    }
}

/// Adam with bias correction; moment estimates persist across steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    first: Vec<Array2<f64>>,
    second: Vec<Array2<f64>>,
}

impl Adam {
    pub fn new(params: &ClassifierParams, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        let zeros: Vec<_> = params.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect();
        Adam {
            beta1,
            beta2,
            epsilon,
            step: 0,
            first: zeros.clone(),
            second: zeros,
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn apply(&mut self, params: &mut ClassifierParams, grads: &[Array2<f64>], lr: f64) {
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, eps) = (self.beta1, self.beta2, self.epsilon);
        for (((w, g), m), v) in params
            .weights
            .iter_mut()
            .zip(grads)
            .zip(&mut self.first)
            .zip(&mut self.second)
        {
            Zip::from(w).and(g).and(m).and(v).for_each(|w, &g, m, v| {
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                *w -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
            });
        }
    }
}

/// A classifier together with its optimizer state.
#[derive(Clone, Debug)]
pub struct Classifier {
    pub params: ClassifierParams,
    pub optimizer: Adam,
    pub epochs_trained: usize,
}

impl Classifier {
    pub fn new(params: ClassifierParams, cfg: &TrainConfig) -> Self {
        let optimizer = Adam::new(&params, cfg.beta1, cfg.beta2, cfg.epsilon);
        Classifier {
            params,
            optimizer,
            epochs_trained: 0,
        }
    }

    /// One full-batch Adam step on `nodes`; returns the loss before the step.
    pub fn step(
        &mut self,
        input: &ModelInput,
        nodes: &[usize],
        labels: &[usize],
        learning_rate: f64,
    ) -> Result<f64> {
        let (loss, grads) = loss_and_gradients(&self.params, input, labels, nodes)?;
        self.optimizer.apply(&mut self.params, &grads, learning_rate);
        Ok(loss)
    }
}

/// Trains from a seeded Glorot initialization for `cfg.epochs` full-batch steps on
/// the training nodes. `labels` is indexed by node id.
pub fn train(
    graph: &Graph,
    partition: &Partition,
    labels: &[usize],
    cfg: &TrainConfig,
) -> Result<Classifier> {
    cfg.validate()?;
    if labels.len() != graph.num_nodes() {
        return Err(Error::dim(format!(
            "{} labels for {} nodes",
            labels.len(),
            graph.num_nodes()
        )));
    }
    let mut rng = seed::stream(cfg.seed, "init", 0);
    let params = ClassifierParams::glorot(
        cfg.variant,
        graph.num_features(),
        cfg.hidden,
        graph.num_classes(),
        cfg.sgc_hops,
        &mut rng,
    );
    let mut clf = Classifier::new(params, cfg);
    let input = ModelInput::from_graph(graph);
    let mut last_finite = None;
    for epoch in 0..cfg.epochs {
        match clf.step(&input, &partition.train_ids, labels, cfg.learning_rate) {
            Ok(loss) if loss.is_finite() && clf.params.is_finite() => last_finite = Some(epoch),
            Ok(_) | Err(Error::NonFinite { .. }) => {
                return Err(Error::Diverged {
                    epoch,
                    last_finite_epoch: last_finite,
                })
            }
            Err(e) => return Err(e),
        }
        clf.epochs_trained += 1;
    }
    Ok(clf)
}

/// One Adam step on `node_ids` with the classifier's persistent optimizer state.
pub fn retrain_step(
    clf: &mut Classifier,
    input: &ModelInput,
    node_ids: &[usize],
    labels: &[usize],
    learning_rate: f64,
) -> Result<f64> {
    clf.step(input, node_ids, labels, learning_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::forward;
    use crate::graph::{generate_sbm, partition_nodes, SbmConfig};

    fn small() -> (Graph, Partition) {
        let mut cfg = SbmConfig::desk(3);
        cfg.num_nodes = 60;
        cfg.num_features = 8;
        let g = generate_sbm(&cfg).unwrap();
        let p = partition_nodes(60, (0.4, 0.2, 0.4), 1).unwrap();
        (g, p)
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let (g, p) = small();
        let cfg = TrainConfig {
            epochs: 0,
            hidden: 4,
            ..Default::default()
        };
        let clf = train(&g, &p, g.latent_labels().unwrap(), &cfg).unwrap();
        let init = ClassifierParams::glorot(Variant::Gcn, 8, 4, 2, 2, &mut seed::stream(0, "init", 0));
        assert_eq!(clf.params, init);
    }

    #[test]
    fn training_is_bit_reproducible() {
        let (g, p) = small();
        let cfg = TrainConfig {
            epochs: 5,
            hidden: 4,
            seed: 4,
            ..Default::default()
        };
        let a = train(&g, &p, g.latent_labels().unwrap(), &cfg).unwrap();
        let b = train(&g, &p, g.latent_labels().unwrap(), &cfg).unwrap();
        assert_eq!(a.params, b.params);
    }

    #[test]
    fn retrain_with_zero_rate_keeps_params() {
        let (g, p) = small();
        let cfg = TrainConfig {
            epochs: 3,
            hidden: 4,
            ..Default::default()
        };
        let mut clf = train(&g, &p, g.latent_labels().unwrap(), &cfg).unwrap();
        let before = clf.params.clone();
        let input = ModelInput::from_graph(&g);
        retrain_step(&mut clf, &input, &p.test_ids, g.latent_labels().unwrap(), 0.0).unwrap();
        assert_eq!(before, clf.params);
    }

    #[test]
    fn sequential_steps_equal_loop() {
        let (g, p) = small();
        let cfg = TrainConfig {
            epochs: 3,
            hidden: 4,
            ..Default::default()
        };
        let labels = g.latent_labels().unwrap();
        let input = ModelInput::from_graph(&g);
        let mut a = train(&g, &p, labels, &cfg).unwrap();
        let mut b = a.clone();
        retrain_step(&mut a, &input, &p.test_ids, labels, 1e-3).unwrap();
        retrain_step(&mut a, &input, &p.test_ids, labels, 1e-3).unwrap();
        for _ in 0..2 {
            retrain_step(&mut b, &input, &p.test_ids, labels, 1e-3).unwrap();
        }
        assert_eq!(a.params, b.params);
        assert_eq!(a.optimizer, b.optimizer);
    }

    #[test]
    fn separable_sbm_is_learned() {
        let cfg = SbmConfig {
            num_nodes: 400,
            num_blocks: 2,
            p_in: 0.2,
            p_out: 0.01,
            num_features: 10,
            q_on: 1.0,
            q_off: 0.0,
            seed: 5,
        };
        let g = generate_sbm(&cfg).unwrap();
        let p = partition_nodes(400, (0.4, 0.2, 0.4), 2).unwrap();
        let labels = g.latent_labels().unwrap();
        let clf = train(&g, &p, labels, &TrainConfig::default()).unwrap();
        let pred = forward(&clf.params, &ModelInput::from_graph(&g)).unwrap();
        let correct = p.train_ids.iter().filter(|&&i| pred.labels[i] == labels[i]).count();
        assert!(correct as f64 / p.train_ids.len() as f64 >= 0.99);
    }
}
