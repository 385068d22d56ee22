//! Experiment drivers: defense, alert, parameter sweep, ablation and runtime.

use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::metrics::{compute_metrics, mean_and_sd, MetricsReport};
use super::roc::{roc_auc, RocReport};
use crate::classifier::{forward, train, Classifier, ModelInput};
use crate::config::{AutoLabelSource, ContextPolicy, DatasetSpec, ExperimentConfig};
use crate::error::{Error, Result};
use crate::graph::{generate_sbm, load_graph_dir, partition_nodes, Graph, Partition};
use crate::inference::{
    alert_score, disagreement_score, run_inference_with_labels, warmup_transition, InferenceConfig, Mode, TraceRecord,
    TransitionModel,
};
use crate::perturb::{attack_lf, inject_label_noise, sample_subgraphs, DynamicSubgraph, NoisyLabels};
use crate::seed;

/// Graph, split, noisy annotations, trained classifier and warm-up transition.
#[derive(Clone, Debug)]
pub struct PreparedExperiment {
    pub graph: Graph,
    pub partition: Partition,
    /// Manual labels of the train nodes, aligned with `partition.train_ids`.
    pub noisy: NoisyLabels,
    pub classifier: Classifier,
    pub warmup: TransitionModel,
    /// Predictions on the train graph, aligned with `partition.train_ids`.
    pub train_predictions: Vec<usize>,
}

impl PreparedExperiment {
    pub fn context_ids(&self, policy: ContextPolicy) -> Vec<usize> {
        match policy {
            ContextPolicy::Train => self.partition.train_ids.clone(),
            ContextPolicy::None => Vec::new(),
        }
    }

    /// Clean predictions on `nodes` evaluated with the configured context.
    pub fn evaluate_nodes(&self, nodes: &[usize], policy: ContextPolicy) -> Result<MetricsReport> {
        let sub = DynamicSubgraph::new(&self.graph, nodes.to_vec(), self.context_ids(policy))?;
        evaluate_view(&sub, &self.classifier)
    }
}

pub fn load_dataset(cfg: &ExperimentConfig) -> Result<Graph> {
    match &cfg.dataset {
        DatasetSpec::Sbm(sbm) => {
            let mut sbm = sbm.clone();
            sbm.seed = cfg.stream_seed("dataset", 0);
            generate_sbm(&sbm)
        }
        DatasetSpec::Files { dir } => load_graph_dir(dir),
    }
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<PreparedExperiment> {
    let graph = load_dataset(cfg)?;
    prepare_with_graph(cfg, graph)
}

/// Splits the graph, injects label noise into the train labels, trains on the
/// train graph and builds the warm-up transition from its predictions.
pub fn prepare_with_graph(cfg: &ExperimentConfig, graph: Graph) -> Result<PreparedExperiment> {
    prepare_from(cfg, graph, None)
}

/// As [`prepare_with_graph`], reusing `classifier` instead of training when given.
pub fn prepare_from(cfg: &ExperimentConfig, graph: Graph, classifier: Option<Classifier>) -> Result<PreparedExperiment> {
    cfg.validate()?;
    let latent = graph
        .latent_labels()
        .ok_or_else(|| Error::invalid("experiments need latent labels"))?
        .to_vec();
    let [f_train, f_val, f_test] = cfg.partition;
    let partition = partition_nodes(graph.num_nodes(), (f_train, f_val, f_test), cfg.stream_seed("partition", 0))?;
    if partition.train_ids.is_empty() || partition.test_ids.is_empty() {
        return Err(Error::invalid("partition leaves the train or test split empty"));
    }
    let train_latent: Vec<usize> = partition.train_ids.iter().map(|&i| latent[i]).collect();
    let noisy = inject_label_noise(
        &train_latent,
        cfg.noise_ratio,
        graph.num_classes(),
        cfg.stream_seed("noise", 0),
    )?;

    let train_graph = graph.induced(&partition.train_ids)?;
    let local = Partition {
        train_ids: (0..partition.train_ids.len()).collect(),
        val_ids: Vec::new(),
        test_ids: Vec::new(),
    };
    let classifier = match classifier {
        Some(c) => {
            if c.params.num_features() != graph.num_features() || c.params.num_classes() != graph.num_classes() {
                return Err(Error::dim("classifier does not match the graph's features or classes"));
            }
            c
        }
        None => {
            let mut train_cfg = cfg.classifier.clone();
            train_cfg.seed = cfg.stream_seed("train", 0);
            train(&train_graph, &local, &noisy.values, &train_cfg)?
        }
    };
    let train_predictions = forward(&classifier.params, &ModelInput::from_graph(&train_graph))?.labels;
    let warmup = warmup_transition(
        &train_predictions,
        &noisy.values,
        &vec![cfg.inference.alpha; graph.num_classes()],
    )?;
    Ok(PreparedExperiment {
        graph,
        partition,
        noisy,
        classifier,
        warmup,
        train_predictions,
    })
}

fn evaluate_view(sub: &DynamicSubgraph, clf: &Classifier) -> Result<MetricsReport> {
    let truth = sub
        .target_labels()
        .ok_or_else(|| Error::invalid("evaluation needs latent labels"))?;
    let bundle = forward(&clf.params, &ModelInput::from_graph(&sub.graph_view))?.select(&sub.targets());
    compute_metrics(&bundle.labels, &truth, sub.graph_view.num_classes())
}

/// Runs `f` over `items`, on up to `jobs` threads; results keep item order.
fn parallel_map<T: Sync, U: Send>(items: &[T], jobs: usize, f: impl Fn(usize, &T) -> Result<U> + Sync) -> Result<Vec<U>> {
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                s.spawn(move || {
                    part.iter()
                        .enumerate()
                        .map(|(j, t)| f(c * chunk + j, t))
                        .collect::<Result<Vec<U>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(items.len());
        for h in handles {
            out.extend(h.join().expect("worker thread panicked")?);
        }
        Ok(out)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainMetrics {
    pub train_nodes: usize,
    pub flipped_labels: usize,
    /// Train-graph predictions against the noisy manual labels.
    pub train_accuracy_vs_manual: f64,
    pub train_accuracy_vs_latent: f64,
    /// Clean accuracy with the configured context.
    pub val: MetricsReport,
    pub test: MetricsReport,
    /// Clean test accuracy with train nodes as context.
    pub test_with_train_context: MetricsReport,
    pub warmup_rows: Vec<Vec<f64>>,
}

pub fn train_metrics(prep: &PreparedExperiment, cfg: &ExperimentConfig) -> Result<TrainMetrics> {
    let latent = prep
        .graph
        .latent_labels()
        .ok_or_else(|| Error::invalid("metrics need latent labels"))?;
    let train_latent: Vec<usize> = prep.partition.train_ids.iter().map(|&i| latent[i]).collect();
    let k = prep.graph.num_classes();
    let val = if prep.partition.val_ids.is_empty() {
        compute_metrics(&[], &[], k)?
    } else {
        prep.evaluate_nodes(&prep.partition.val_ids, cfg.context)?
    };
    Ok(TrainMetrics {
        train_nodes: prep.partition.train_ids.len(),
        flipped_labels: prep.noisy.flipped_ids.len(),
        train_accuracy_vs_manual: compute_metrics(&prep.train_predictions, &prep.noisy.values, k)?.accuracy,
        train_accuracy_vs_latent: compute_metrics(&prep.train_predictions, &train_latent, k)?.accuracy,
        val,
        test: prep.evaluate_nodes(&prep.partition.test_ids, cfg.context)?,
        test_with_train_context: prep.evaluate_nodes(&prep.partition.test_ids, ContextPolicy::Train)?,
        warmup_rows: prep.warmup.rows().outer_iter().map(|r| r.to_vec()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackTrial {
    pub index: usize,
    pub node_ids: Vec<usize>,
    pub clean: MetricsReport,
    pub attacked: MetricsReport,
    pub flips: usize,
    pub shortfall: usize,
}

/// Attacks `n_graphs` test subgraphs; returns the per-subgraph report and the
/// perturbed subgraphs.
pub fn run_attack_with(prep: &PreparedExperiment, cfg: &ExperimentConfig) -> Result<(Vec<AttackTrial>, Vec<DynamicSubgraph>)> {
    let subs = sample_eval_subgraphs(prep, cfg, &prep.partition.test_ids, cfg.n_graphs)?;
    let pairs = attack_all(subs.clone(), prep, cfg)?;
    let mut trials = Vec::new();
    let mut attacked = Vec::new();
    for (i, (sub, pair)) in subs.iter().zip(pairs).enumerate() {
        trials.push(AttackTrial {
            index: i + 1,
            node_ids: sub.node_ids.clone(),
            clean: evaluate_view(sub, &prep.classifier)?,
            attacked: evaluate_view(&pair.attacked, &prep.classifier)?,
            flips: pair.attacked.attack_log.len(),
            shortfall: pair.attacked.attack_shortfall,
        });
        attacked.push(pair.attacked);
    }
    Ok((trials, attacked))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    fn of(values: &[f64]) -> Self {
        let (mean, sd) = mean_and_sd(values);
        MeanSd { mean, sd }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefenseTrial {
    pub index: usize,
    pub node_ids: Vec<usize>,
    pub original: MetricsReport,
    pub attack: MetricsReport,
    pub graphss: MetricsReport,
    pub attack_flips: usize,
    pub attack_shortfall: usize,
    pub retrain_steps: usize,
    #[serde(skip)]
    pub attack_log_jsonl: String,
    #[serde(skip)]
    pub trace: Vec<TraceRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefenseReport {
    pub trials: Vec<DefenseTrial>,
    pub original: MeanSd,
    pub attack: MeanSd,
    pub graphss: MeanSd,
}

impl DefenseReport {
    fn from_trials(trials: Vec<DefenseTrial>) -> Self {
        let col = |f: fn(&DefenseTrial) -> f64| MeanSd::of(&trials.iter().map(f).collect::<Vec<_>>());
        DefenseReport {
            original: col(|t| t.original.accuracy),
            attack: col(|t| t.attack.accuracy),
            graphss: col(|t| t.graphss.accuracy),
            trials,
        }
    }

    pub fn without_runtime(mut self) -> Self {
        for t in &mut self.trials {
            t.graphss = std::mem::take(&mut t.graphss).without_runtime();
        }
        self
    }

    /// Fraction of the Original→Attack drop recovered by the defense.
    pub fn recovery(&self) -> f64 {
        let drop = self.original.mean - self.attack.mean;
        if drop <= 0.0 {
            return f64::NAN;
        }
        (self.graphss.mean - self.attack.mean) / drop
    }
}

fn sample_eval_subgraphs(
    prep: &PreparedExperiment,
    cfg: &ExperimentConfig,
    pool: &[usize],
    count: usize,
) -> Result<Vec<DynamicSubgraph>> {
    sample_subgraphs(
        &prep.graph,
        pool,
        &prep.context_ids(cfg.context),
        cfg.subgraph_fraction,
        count,
        cfg.stream_seed("subgraphs", 0),
    )
}

fn attack_one(sub: &DynamicSubgraph, i: usize, prep: &PreparedExperiment, cfg: &ExperimentConfig) -> Result<AttackedPair> {
    let mut attack = cfg.attack.clone();
    attack.seed = cfg.stream_seed("attack", i as u64);
    Ok(AttackedPair {
        arrival_labels: predicted_labels(sub, &prep.classifier)?,
        attacked: attack_lf(sub, &prep.classifier.params, &attack)?,
    })
}

fn attack_all(subs: Vec<DynamicSubgraph>, prep: &PreparedExperiment, cfg: &ExperimentConfig) -> Result<Vec<AttackedPair>> {
    parallel_map(&subs, cfg.jobs, |i, s| attack_one(s, i, prep, cfg))
}

/// A subgraph as it arrived and after the attack.
#[derive(Clone, Debug)]
struct AttackedPair {
    arrival_labels: Vec<usize>,
    attacked: DynamicSubgraph,
}

fn predicted_labels(sub: &DynamicSubgraph, clf: &Classifier) -> Result<Vec<usize>> {
    Ok(forward(&clf.params, &ModelInput::from_graph(&sub.graph_view))?
        .select(&sub.targets())
        .labels)
}

fn auto_labels<'a>(pair: &'a AttackedPair, source: AutoLabelSource) -> Option<&'a [usize]> {
    match source {
        AutoLabelSource::Arrival => Some(&pair.arrival_labels),
        AutoLabelSource::Current => None,
    }
}

fn infer(
    pair: &AttackedPair,
    prep: &PreparedExperiment,
    cfg: &ExperimentConfig,
    inference: &InferenceConfig,
    mode: Mode,
    rng_seed: u64,
) -> Result<crate::inference::InferenceOutcome> {
    let mut rng = seed::rng_from_seed(rng_seed);
    run_inference_with_labels(
        &pair.attacked.graph_view,
        &pair.attacked.targets(),
        &prep.classifier,
        mode,
        inference,
        &prep.warmup,
        auto_labels(pair, cfg.auto_labels),
        &mut rng,
    )
}

fn defend(
    pair: &AttackedPair,
    prep: &PreparedExperiment,
    cfg: &ExperimentConfig,
    inference: &InferenceConfig,
    rng_seed: u64,
) -> Result<(MetricsReport, usize, Vec<TraceRecord>)> {
    let truth = pair
        .attacked
        .target_labels()
        .ok_or_else(|| Error::invalid("evaluation needs latent labels"))?;
    let start = Instant::now();
    let out = infer(pair, prep, cfg, inference, Mode::Defense, rng_seed)?;
    let seconds = start.elapsed().as_secs_f64();
    let report = compute_metrics(&out.inferred_labels, &truth, prep.graph.num_classes())?.with_runtime(seconds);
    Ok((report, out.retrain_steps, out.trace))
}

/// Original, Attack and GraphSS accuracy on `n_graphs` subgraphs of the test split.
pub fn run_defense_experiment(cfg: &ExperimentConfig) -> Result<DefenseReport> {
    let prep = prepare(cfg)?;
    run_defense_with(&prep, cfg)
}

pub fn run_defense_with(prep: &PreparedExperiment, cfg: &ExperimentConfig) -> Result<DefenseReport> {
    let subs = sample_eval_subgraphs(prep, cfg, &prep.partition.test_ids, cfg.n_graphs)?;
    let mut inference = cfg.inference.clone();
    inference.trace |= cfg.trace;
    let trials = parallel_map(&subs, cfg.jobs, |i, sub| {
        let original = evaluate_view(sub, &prep.classifier)?;
        let pair = attack_one(sub, i, prep, cfg)?;
        let attacked = &pair.attacked;
        let attack = evaluate_view(attacked, &prep.classifier)?;
        let (graphss, retrain_steps, trace) = defend(&pair, prep, cfg, &inference, cfg.stream_seed("gibbs", i as u64))?;
        Ok(DefenseTrial {
            index: i + 1,
            node_ids: sub.node_ids.clone(),
            original,
            attack,
            graphss,
            attack_flips: attacked.attack_log.len(),
            attack_shortfall: attacked.attack_shortfall,
            retrain_steps,
            attack_log_jsonl: attacked.attack_log_jsonl(),
            trace,
        })
    })?;
    Ok(DefenseReport::from_trials(trials))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlertRecord {
    pub outer: usize,
    pub index: usize,
    pub perturbed: bool,
    pub score: f64,
    pub disagreement: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlertReport {
    pub records: Vec<AlertRecord>,
    /// Pooled ROC of the transition-drift score.
    pub roc: RocReport,
    /// Pooled ROC of the disagreement rate between inferred and auto-generated labels.
    pub disagreement_roc: Option<RocReport>,
    /// Per outer seed AUC, absent when that seed's group is single-class.
    pub per_seed_auc: Vec<Option<f64>>,
}

/// Per outer seed: `alert.n_graphs` subgraphs of which `alert.n_perturbed` are
/// attacked, each scored in alert mode; the ROC pools every outer seed.
pub fn run_alert_experiment(cfg: &ExperimentConfig) -> Result<AlertReport> {
    let mut records = Vec::new();
    let mut per_seed_auc = Vec::new();
    for outer in 0..cfg.alert.outer_seeds {
        let mut inner = cfg.clone();
        inner.seed = cfg.stream_seed("outer", outer as u64);
        let prep = prepare(&inner)?;
        let part = alert_group(&prep, &inner, outer)?;
        let pairs: Vec<(f64, bool)> = part.iter().map(|r| (r.score, r.perturbed)).collect();
        per_seed_auc.push(roc_auc(&pairs).ok().map(|r| r.auc));
        records.extend(part);
    }
    let pairs: Vec<(f64, bool)> = records.iter().map(|r| (r.score, r.perturbed)).collect();
    let roc = roc_auc(&pairs)?;
    let dis: Vec<(f64, bool)> = records.iter().map(|r| (r.disagreement, r.perturbed)).collect();
    Ok(AlertReport {
        records,
        roc,
        disagreement_roc: roc_auc(&dis).ok(),
        per_seed_auc,
    })
}

fn alert_group(prep: &PreparedExperiment, cfg: &ExperimentConfig, outer: usize) -> Result<Vec<AlertRecord>> {
    let subs = sample_eval_subgraphs(prep, cfg, &prep.partition.test_ids, cfg.alert.n_graphs)?;
    let mut picks: Vec<usize> = (0..subs.len()).collect();
    picks.shuffle(&mut seed::stream(cfg.seed, "alert-pick", 0));
    picks.truncate(cfg.alert.n_perturbed);
    let inference = cfg.inference.clone();
    parallel_map(&subs, cfg.jobs, |i, sub| {
        let perturbed = picks.contains(&i);
        let pair = if perturbed {
            attack_one(sub, i, prep, cfg)?
        } else {
            AttackedPair {
                arrival_labels: predicted_labels(sub, &prep.classifier)?,
                attacked: sub.clone(),
            }
        };
        let out = infer(&pair, prep, cfg, &inference, Mode::Alert, cfg.stream_seed("gibbs", i as u64))?;
        Ok(AlertRecord {
            outer,
            index: i + 1,
            perturbed,
            score: alert_score(&out.dynamic, &prep.warmup)?,
            disagreement: disagreement_score(&out.inferred_labels, &out.auto_labels),
        })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub ws: usize,
    pub retrain: usize,
    pub valid: bool,
    /// Mean inferred-label accuracy over the attacked validation subgraphs.
    pub accuracy: Option<f64>,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("ws,retrain,valid,accuracy\n");
    for r in rows {
        let acc = r.accuracy.map(|a| a.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", r.ws, r.retrain, r.valid, acc));
    }
    out
}

/// Grid search over `(WS, Retrain)` on attacked subgraphs of the validation split.
pub fn run_sweep(cfg: &ExperimentConfig, ws_grid: &[usize], retrain_grid: &[usize]) -> Result<Vec<SweepRow>> {
    if ws_grid.is_empty() || retrain_grid.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    run_sweep_with(&prepare(cfg)?, cfg, ws_grid, retrain_grid)
}

pub fn run_sweep_with(
    prep: &PreparedExperiment,
    cfg: &ExperimentConfig,
    ws_grid: &[usize],
    retrain_grid: &[usize],
) -> Result<Vec<SweepRow>> {
    if ws_grid.is_empty() || retrain_grid.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    if prep.partition.val_ids.is_empty() {
        return Err(Error::invalid("sweep needs a validation split"));
    }
    let subs = sample_eval_subgraphs(prep, cfg, &prep.partition.val_ids, cfg.n_graphs)?;
    let attacked = attack_all(subs, prep, cfg)?;
    let mut rows = Vec::new();
    for &ws in ws_grid {
        for &retrain in retrain_grid {
            let mut inference = cfg.inference.clone();
            inference.ws = ws;
            inference.retrain = retrain;
            if inference.validate().is_err() {
                rows.push(SweepRow {
                    ws,
                    retrain,
                    valid: false,
                    accuracy: None,
                });
                continue;
            }
            let accs = parallel_map(&attacked, cfg.jobs, |i, a| {
                Ok(defend(a, prep, cfg, &inference, cfg.stream_seed("gibbs", i as u64))?.0.accuracy)
            })?;
            rows.push(SweepRow {
                ws,
                retrain,
                valid: true,
                accuracy: Some(mean_and_sd(&accs).0),
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationCell {
    pub dynamic_transition: bool,
    pub retrain: bool,
    pub accuracy: MeanSd,
    pub trials: Vec<MetricsReport>,
}

/// `{fixed, dynamic transition} × {no retrain, retrain}` on the same attacked
/// subgraphs and sampler seeds.
pub fn run_ablation(cfg: &ExperimentConfig) -> Result<Vec<AblationCell>> {
    run_ablation_with(&prepare(cfg)?, cfg)
}

pub fn run_ablation_with(prep: &PreparedExperiment, cfg: &ExperimentConfig) -> Result<Vec<AblationCell>> {
    let subs = sample_eval_subgraphs(prep, cfg, &prep.partition.test_ids, cfg.n_graphs)?;
    let attacked = attack_all(subs, prep, cfg)?;
    let mut cells = Vec::new();
    for dynamic_transition in [false, true] {
        for retrain in [false, true] {
            let mut inference = cfg.inference.clone();
            inference.dynamic_transition = dynamic_transition;
            if !retrain {
                inference.retrain = 0;
            }
            let trials = parallel_map(&attacked, cfg.jobs, |i, a| {
                Ok(defend(a, prep, cfg, &inference, cfg.stream_seed("gibbs", i as u64))?.0)
            })?;
            let accs: Vec<f64> = trials.iter().map(|t| t.accuracy).collect();
            cells.push(AblationCell {
                dynamic_transition,
                retrain,
                accuracy: MeanSd::of(&accs),
                trials,
            });
        }
    }
    Ok(cells)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRow {
    pub num_nodes: usize,
    pub eval_nodes: usize,
    pub repetitions: usize,
    pub defense_seconds: f64,
    pub alert_seconds: f64,
    pub defense_unit: f64,
    pub alert_unit: f64,
}

pub fn runtime_csv(rows: &[RuntimeRow]) -> String {
    let mut out = String::from("num_nodes,eval_nodes,repetitions,defense_seconds,alert_seconds,defense_unit,alert_unit\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.num_nodes, r.eval_nodes, r.repetitions, r.defense_seconds, r.alert_seconds, r.defense_unit, r.alert_unit
        ));
    }
    out
}

/// Mean wall-clock inference time per size over `repetitions` attacked subgraphs,
/// for defense and alert mode. Requires an SBM dataset; with `constant_degree`
/// the edge probabilities scale as `1/N` from the configured size.
pub fn measure_runtime(cfg: &ExperimentConfig, sizes: &[usize]) -> Result<Vec<RuntimeRow>> {
    let DatasetSpec::Sbm(base) = &cfg.dataset else {
        return Err(Error::invalid("runtime measurement needs an SBM dataset"));
    };
    if sizes.is_empty() {
        return Err(Error::invalid("no sizes given"));
    }
    let reps = cfg.runtime.repetitions;
    let mut rows = Vec::new();
    for &n in sizes {
        let mut sbm = base.clone();
        sbm.num_nodes = n;
        if cfg.runtime.constant_degree {
            let scale = base.num_nodes as f64 / n as f64;
            sbm.p_in = (base.p_in * scale).min(1.0);
            sbm.p_out = (base.p_out * scale).min(1.0);
        }
        let mut sized = cfg.clone();
        sized.dataset = DatasetSpec::Sbm(sbm);
        sized.seed = cfg.stream_seed("runtime", n as u64);
        let prep = prepare(&sized)?;
        let subs = sample_eval_subgraphs(&prep, &sized, &prep.partition.test_ids, reps)?;
        let attacked = attack_all(subs, &prep, &sized)?;
        let (mut defense, mut alert) = (0.0, 0.0);
        for (i, pair) in attacked.iter().enumerate() {
            for (mode, total) in [(Mode::Defense, &mut defense), (Mode::Alert, &mut alert)] {
                let start = Instant::now();
                infer(pair, &prep, &sized, &sized.inference, mode, sized.stream_seed("gibbs", i as u64))?;
                *total += start.elapsed().as_secs_f64();
            }
        }
        let eval_nodes = attacked[0].attacked.node_ids.len();
        let (defense, alert) = (defense / reps as f64, alert / reps as f64);
        rows.push(RuntimeRow {
            num_nodes: n,
            eval_nodes,
            repetitions: reps,
            defense_seconds: defense,
            alert_seconds: alert,
            defense_unit: defense * 100.0 / eval_nodes as f64,
            alert_unit: alert * 100.0 / eval_nodes as f64,
        });
    }
    Ok(rows)
}
