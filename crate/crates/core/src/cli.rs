//! The `graphss` command line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::classifier::{load_checkpoint, save_checkpoint, Classifier};
use crate::config::{DatasetSpec, ExperimentConfig};
use crate::error::{Error, Result};
use crate::eval::{
    load_dataset, measure_runtime, prepare_from, run_ablation_with, run_alert_experiment, run_attack_with,
    run_defense_with, run_sweep_with, runtime_csv, sweep_csv, train_metrics, PreparedExperiment,
};
use crate::graph::save_graph;
use crate::manifest::{file_digest, Manifest, MANIFEST_FILE};

#[derive(Debug, Parser)]
#[command(name = "graphss", version, about = "Bayesian self-supervised defense and alert for GCN node classifiers")]
pub struct Cli {
    /// Experiment config JSON, or a manifest.json from an earlier run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Run trials on a single thread.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[arg(long, global = true, env = "GRAPHSS_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// Write per-epoch inference traces.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Config override `key=value`; `--key.path value` is accepted as well.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Graph directory; replaces the configured dataset.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Checkpoint written by `train`; trains from the config when absent.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Edge flips per victim.
    #[arg(long)]
    pub n_pert: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic SBM graph.
    GenData,
    /// Train on noisy manual labels and write a checkpoint.
    Train(DataArgs),
    /// Attack test subgraphs and write the perturbed views.
    Attack(ModelArgs),
    /// Original, Attack and GraphSS accuracy over test subgraphs.
    Defend(ModelArgs),
    /// Alert scores and ROC over partly perturbed subgraph groups.
    Alert(ModelArgs),
    /// Grid search of warm-up steps and retraining budget on validation subgraphs.
    Sweep(ModelArgs),
    /// Fixed or dynamic transition, with or without retraining.
    Ablate(ModelArgs),
    /// Inference runtime across SBM sizes.
    Runtime,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GenData => "gen-data",
            Command::Train(_) => "train",
            Command::Attack(_) => "attack",
            Command::Defend(_) => "defend",
            Command::Alert(_) => "alert",
            Command::Sweep(_) => "sweep",
            Command::Ablate(_) => "ablate",
            Command::Runtime => "runtime",
        }
    }
}

/// Rewrites `--a.b v` and `--a.b=v` into `--set a.b=v`.
fn expand_dotted(args: Vec<OsString>) -> Vec<OsString> {
    let mut out = Vec::with_capacity(args.len());
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let Some(text) = arg.to_str() else {
            out.push(arg);
            continue;
        };
        match text.strip_prefix("--") {
            Some(flag) if flag.split('=').next().is_some_and(|k| k.contains('.')) => {
                out.push("--set".into());
                if flag.contains('=') {
                    out.push(flag.into());
                } else {
                    let value = iter.next().map(|v| v.to_string_lossy().into_owned()).unwrap_or_default();
                    out.push(format!("{flag}={value}").into());
                }
            }
            _ => out.push(arg),
        }
    }
    out
}

/// Arguments after the subcommand name that a rerun needs.
fn command_args(command: &Command) -> Vec<String> {
    let mut args = vec![command.name().to_owned()];
    let (data, checkpoint) = match command {
        Command::Train(d) => (d.data.clone(), None),
        Command::Attack(m) | Command::Defend(m) | Command::Alert(m) | Command::Sweep(m) | Command::Ablate(m) => {
            (m.data.data.clone(), m.checkpoint.clone())
        }
        Command::GenData | Command::Runtime => (None, None),
    };
    if let Some(d) = data {
        args.extend(["--data".to_owned(), d.display().to_string()]);
    }
    if let Some(c) = checkpoint {
        args.extend(["--checkpoint".to_owned(), c.display().to_string()]);
    }
    args
}

fn load_base_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("format").and_then(|f| f.as_str()) == Some(crate::manifest::MANIFEST_FORMAT) {
        Ok(Manifest::load(path)?.config)
    } else {
        ExperimentConfig::from_json(&text)
    }
}

fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => load_base_config(p)?,
        None => ExperimentConfig::default(),
    };
    cfg = cfg.with_overrides(cli.overrides.iter().map(String::as_str))?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    cfg.deterministic |= cli.deterministic;
    if cfg.deterministic {
        cfg.jobs = 1;
    }
    cfg.trace |= cli.trace;
    let data = match &cli.command {
        Command::Train(d) => d.data.clone(),
        Command::Attack(m) | Command::Defend(m) | Command::Alert(m) | Command::Sweep(m) | Command::Ablate(m) => {
            if let Some(n) = m.n_pert {
                cfg.attack.n_pert = n;
            }
            m.data.data.clone()
        }
        _ => None,
    };
    if let Some(dir) = data {
        cfg.dataset = DatasetSpec::Files { dir };
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Collects files written into the output directory.
struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
    timing_files: Vec<String>,
    timings: BTreeMap<String, f64>,
}

impl Outputs {
    fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Outputs {
            dir,
            files: Vec::new(),
            timing_files: Vec::new(),
            timings: BTreeMap::new(),
        })
    }

    fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.files.push(name.to_owned());
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        self.write(name, serde_json::to_string_pretty(value)? + "\n")
    }

    fn timing(&mut self, key: impl Into<String>, seconds: f64) {
        self.timings.insert(key.into(), seconds);
    }

    fn graph(&mut self, name: &str, graph: &crate::graph::Graph) -> Result<()> {
        let dir = self.dir.join(name);
        save_graph(graph, &dir)?;
        for f in ["meta.json", "edges.csv", "features.csv", "labels.csv"] {
            self.files.push(format!("{name}/{f}"));
        }
        Ok(())
    }

    fn finish(mut self, mut manifest: Manifest, started: Instant) -> Result<()> {
        if !self.timings.is_empty() {
            let text = serde_json::to_string_pretty(&self.timings)? + "\n";
            let path = self.dir.join("timings.json");
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            self.timing_files.push("timings.json".to_owned());
        }
        self.files.sort();
        for f in &self.files {
            manifest.outputs.push(file_digest(&self.dir.join(f), f.clone())?);
        }
        self.timing_files.sort();
        manifest.timing_outputs = self.timing_files;
        manifest.elapsed_seconds = started.elapsed().as_secs_f64();
        manifest.write(&self.dir)?;
        Ok(())
    }
}

fn prepare_for(cfg: &ExperimentConfig, args: &ModelArgs, manifest: &mut Manifest) -> Result<PreparedExperiment> {
    let graph = load_dataset(cfg)?;
    if let DatasetSpec::Files { dir } = &cfg.dataset {
        for f in ["meta.json", "edges.csv", "features.csv", "labels.csv"] {
            manifest.inputs.push(file_digest(&dir.join(f), dir.join(f).display().to_string())?);
        }
    }
    let classifier = match &args.checkpoint {
        Some(path) => {
            manifest.inputs.push(file_digest(path, path.display().to_string())?);
            let (header, params) = load_checkpoint(path)?;
            let mut clf = Classifier::new(params, &cfg.classifier);
            clf.epochs_trained = header.epoch;
            Some(clf)
        }
        None => None,
    };
    prepare_from(cfg, graph, classifier)
}

fn execute(cli: &Cli) -> Result<()> {
    let started = Instant::now();
    let cfg = resolve_config(cli)?;
    let dir = cli
        .out_dir
        .clone()
        .ok_or_else(|| Error::invalid("no output directory: pass --out-dir or set GRAPHSS_OUT_DIR"))?;
    let mut out = Outputs::new(dir)?;
    let mut manifest = Manifest::new(cli.command.name(), command_args(&cli.command), &cfg);

    match &cli.command {
        Command::GenData => {
            if !matches!(cfg.dataset, DatasetSpec::Sbm(_)) {
                return Err(Error::invalid("gen-data needs an sbm dataset"));
            }
            let graph = load_dataset(&cfg)?;
            save_graph(&graph, &out.dir)?;
            for f in ["meta.json", "edges.csv", "features.csv", "labels.csv"] {
                out.files.push(f.to_owned());
            }
        }
        Command::Train(data) => {
            let args = ModelArgs {
                data: data.clone(),
                checkpoint: None,
                n_pert: None,
            };
            let t = Instant::now();
            let prep = prepare_for(&cfg, &args, &mut manifest)?;
            out.timing("train", t.elapsed().as_secs_f64());
            let path = out.dir.join("checkpoint.bin");
            save_checkpoint(
                &path,
                &prep.classifier.params,
                cfg.stream_seed("train", 0),
                prep.classifier.epochs_trained,
            )?;
            out.files.push("checkpoint.bin".to_owned());
            out.json("train_metrics.json", &train_metrics(&prep, &cfg)?)?;
            out.json("partition.json", &prep.partition)?;
            let mut labels = String::from("node_id,label\n");
            for (id, y) in prep.partition.train_ids.iter().zip(&prep.noisy.values) {
                labels.push_str(&format!("{id},{y}\n"));
            }
            out.write("manual_labels.csv", labels)?;
        }
        Command::Attack(args) => {
            let prep = prepare_for(&cfg, args, &mut manifest)?;
            let (trials, attacked) = run_attack_with(&prep, &cfg)?;
            out.json("attack_report.json", &trials)?;
            for (i, sub) in attacked.iter().enumerate() {
                let name = format!("subgraph_{}", i + 1);
                out.write(&format!("{name}/attack_log.jsonl"), sub.attack_log_jsonl())?;
                let ids: String = std::iter::once("local,global\n".to_owned())
                    .chain((0..sub.graph_view.num_nodes()).map(|l| format!("{l},{}\n", sub.global_id(l))))
                    .collect();
                out.write(&format!("{name}/node_ids.csv"), ids)?;
                out.graph(&name, &sub.graph_view)?;
            }
        }
        Command::Defend(args) => {
            let prep = prepare_for(&cfg, args, &mut manifest)?;
            let report = run_defense_with(&prep, &cfg)?;
            for t in &report.trials {
                if let Some(s) = t.graphss.runtime_seconds {
                    out.timing(format!("graphss_seconds_{}", t.index), s);
                }
                if let Some(u) = t.graphss.unit_runtime {
                    out.timing(format!("graphss_unit_{}", t.index), u);
                }
                out.write(&format!("attack_log_{}.jsonl", t.index), &t.attack_log_jsonl)?;
                for (stage, m) in [("original", &t.original), ("attack", &t.attack), ("graphss", &t.graphss)] {
                    out.write(&format!("confusion_log_{}_{stage}.csv", t.index), m.log_heatmap_csv())?;
                }
                if cfg.trace {
                    let lines: String = t
                        .trace
                        .iter()
                        .map(|r| serde_json::to_string(r).map(|s| s + "\n"))
                        .collect::<std::result::Result<_, _>>()?;
                    out.write(&format!("trace_{}.jsonl", t.index), lines)?;
                }
            }
            let mut table = String::from("row,mean,sd\n");
            for (row, v) in [("original", &report.original), ("attack", &report.attack), ("graphss", &report.graphss)] {
                table.push_str(&format!("{row},{},{}\n", v.mean, v.sd));
            }
            out.write("defense.csv", table)?;
            out.json("defense.json", &report.without_runtime())?;
        }
        Command::Alert(args) => {
            if args.checkpoint.is_some() {
                return Err(Error::invalid("alert trains one classifier per outer seed and takes no checkpoint"));
            }
            let report = run_alert_experiment(&cfg)?;
            out.json("alert.json", &report)?;
            out.write("roc.csv", report.roc.points_csv())?;
            if let Some(r) = &report.disagreement_roc {
                out.write("roc_disagreement.csv", r.points_csv())?;
            }
            let mut scores = String::from("outer,index,perturbed,score,disagreement\n");
            for r in &report.records {
                scores.push_str(&format!("{},{},{},{},{}\n", r.outer, r.index, r.perturbed, r.score, r.disagreement));
            }
            out.write("scores.csv", scores)?;
        }
        Command::Sweep(args) => {
            let prep = prepare_for(&cfg, args, &mut manifest)?;
            let rows = run_sweep_with(&prep, &cfg, &cfg.sweep.ws_grid, &cfg.sweep.retrain_grid)?;
            out.write("sweep.csv", sweep_csv(&rows))?;
            out.json("sweep.json", &rows)?;
        }
        Command::Ablate(args) => {
            let prep = prepare_for(&cfg, args, &mut manifest)?;
            let mut cells = run_ablation_with(&prep, &cfg)?;
            for c in &mut cells {
                for t in &mut c.trials {
                    *t = std::mem::take(t).without_runtime();
                }
            }
            let mut table = String::from("transition,retrain,mean,sd\n");
            for c in &cells {
                let phi = if c.dynamic_transition { "dynamic" } else { "fixed" };
                table.push_str(&format!("{phi},{},{},{}\n", c.retrain, c.accuracy.mean, c.accuracy.sd));
            }
            out.write("ablation.csv", table)?;
            out.json("ablation.json", &cells)?;
        }
        Command::Runtime => {
            let rows = measure_runtime(&cfg, &cfg.runtime.sizes)?;
            #[derive(Serialize)]
            struct Size {
                num_nodes: usize,
                eval_nodes: usize,
                repetitions: usize,
            }
            let sizes: Vec<Size> = rows
                .iter()
                .map(|r| Size {
                    num_nodes: r.num_nodes,
                    eval_nodes: r.eval_nodes,
                    repetitions: r.repetitions,
                })
                .collect();
            out.json("runtime.json", &sizes)?;
            let path = out.dir.join("runtime.csv");
            fs::write(&path, runtime_csv(&rows)).map_err(|e| Error::io(&path, e))?;
            out.timing_files.push("runtime.csv".to_owned());
            for r in &rows {
                out.timing(format!("defense_unit_{}", r.num_nodes), r.defense_unit);
                out.timing(format!("alert_unit_{}", r.num_nodes), r.alert_unit);
            }
        }
    }
    out.finish(manifest, started)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = expand_dotted(args.into_iter().map(Into::into).collect());
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Arguments that rerun the command recorded in `manifest` into `out_dir`.
pub fn rerun_args(manifest_path: &Path, out_dir: &Path) -> Result<Vec<String>> {
    let m = Manifest::load(manifest_path)?;
    let mut args = vec![
        "graphss".to_owned(),
        "--config".to_owned(),
        manifest_path.display().to_string(),
        "--out-dir".to_owned(),
        out_dir.display().to_string(),
    ];
    args.extend(m.args);
    Ok(args)
}

/// Reproducible output files of a finished run, as recorded in its manifest.
pub fn manifest_outputs(dir: &Path) -> Result<Vec<String>> {
    Ok(Manifest::load(dir.join(MANIFEST_FILE))?
        .outputs
        .into_iter()
        .map(|d| d.path)
        .collect())
}
