//! The pipeline assembled from the primitives: noise, training, subgraph sampling,
//! the attack, and one defense run, without the experiment drivers.
//!
//! ```bash
//! cargo run --release --example manual_pipeline
//! ```

use graphss::classifier::{forward, train, ModelInput, TrainConfig};
use graphss::graph::{generate_sbm, partition_nodes, Partition, SbmConfig};
use graphss::inference::{run_inference_with_labels, warmup_transition, InferenceConfig, Mode};
use graphss::perturb::{attack_lf, inject_label_noise, sample_subgraphs, AttackConfig};
use graphss::seed;

fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

fn main() -> graphss::Result<()> {
    let graph = generate_sbm(&SbmConfig::desk(11))?;
    let latent = graph.latent_labels().unwrap().to_vec();
    let split = partition_nodes(graph.num_nodes(), (0.4, 0.2, 0.4), 11)?;

    // Train inductively on the train graph with noisy manual labels.
    let train_graph = graph.induced(&split.train_ids)?;
    let train_latent: Vec<usize> = split.train_ids.iter().map(|&i| latent[i]).collect();
    let noisy = inject_label_noise(&train_latent, 0.1, 2, 11)?;
    let local = Partition {
        train_ids: (0..train_graph.num_nodes()).collect(),
        val_ids: Vec::new(),
        test_ids: Vec::new(),
    };
    let clf = train(&train_graph, &local, &noisy.values, &TrainConfig::default())?;
    let train_pred = forward(&clf.params, &ModelInput::from_graph(&train_graph))?.labels;
    let warmup = warmup_transition(&train_pred, &noisy.values, &[1.0, 1.0])?;

    let sub = sample_subgraphs(&graph, &split.test_ids, &[], 0.2, 1, 11)?.remove(0);
    let targets = sub.targets();
    let truth = sub.target_labels().unwrap();
    let arrival: Vec<usize> = {
        let labels = forward(&clf.params, &ModelInput::from_graph(&sub.graph_view))?.labels;
        targets.iter().map(|&t| labels[t]).collect()
    };
    let attacked = attack_lf(&sub, &clf.params, &AttackConfig::default())?;
    let after: Vec<usize> = {
        let labels = forward(&clf.params, &ModelInput::from_graph(&attacked.graph_view))?.labels;
        targets.iter().map(|&t| labels[t]).collect()
    };

    let out = run_inference_with_labels(
        &attacked.graph_view,
        &targets,
        &clf,
        Mode::Defense,
        &InferenceConfig::default(),
        &warmup,
        Some(&arrival),
        &mut seed::stream(11, "gibbs", 0),
    )?;
    println!(
        "{} nodes: clean {:.3} attacked {:.3} inferred {:.3}",
        targets.len(),
        accuracy(&arrival, &truth),
        accuracy(&after, &truth),
        accuracy(&out.inferred_labels, &truth)
    );
    Ok(())
}
