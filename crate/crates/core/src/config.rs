//! Experiment configuration: JSON files with dotted-key overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classifier::TrainConfig;
use crate::error::{Error, Result};
use crate::graph::SbmConfig;
use crate::inference::InferenceConfig;
use crate::perturb::AttackConfig;
use crate::seed;

/// Where the graph comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DatasetSpec {
    /// Synthetic SBM. Its `seed` is replaced by the stream derived from the master seed.
    Sbm(SbmConfig),
    /// Directory holding `meta.json`, `edges.csv`, `features.csv`, `labels.csv`.
    Files { dir: PathBuf },
}

/// Which nodes besides the subgraph form the evaluation graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextPolicy {
    /// Train nodes and their edges are visible but never attacked or scored.
    Train,
    /// The subgraph is evaluated on its own.
    None,
}

/// Where the auto-generated labels conditioned on by the sampler come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoLabelSource {
    /// Predictions on the subgraph as it arrived, before any perturbation.
    Arrival,
    /// Predictions on the view being inferred, perturbed or not.
    Current,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlertSettings {
    pub n_graphs: usize,
    pub n_perturbed: usize,
    pub outer_seeds: usize,
}

impl Default for AlertSettings {
    fn default() -> Self {
        AlertSettings {
            n_graphs: 10,
            n_perturbed: 3,
            outer_seeds: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSettings {
    pub ws_grid: Vec<usize>,
    pub retrain_grid: Vec<usize>,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            ws_grid: vec![5, 20, 40, 60, 80],
            retrain_grid: vec![20, 40, 60, 80, 100],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RuntimeSettings {
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    /// Expected degree held fixed across sizes by scaling `p_in` and `p_out` with `1/N`.
    pub constant_degree: bool,
}

impl Default for RuntimeSettings {
    fn default() -> Self {
        RuntimeSettings {
            sizes: vec![500, 1000, 2000, 4000],
            repetitions: 3,
            constant_degree: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub classifier: TrainConfig,
    pub noise_ratio: f64,
    /// Train, validation and test fractions.
    pub partition: [f64; 3],
    pub subgraph_fraction: f64,
    pub n_graphs: usize,
    pub context: ContextPolicy,
    pub auto_labels: AutoLabelSource,
    pub attack: AttackConfig,
    pub inference: InferenceConfig,
    pub alert: AlertSettings,
    pub sweep: SweepSettings,
    pub runtime: RuntimeSettings,
    pub seed: u64,
    pub jobs: usize,
    pub deterministic: bool,
    pub trace: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetSpec::Sbm(SbmConfig::desk(0)),
            classifier: TrainConfig::default(),
            noise_ratio: 0.1,
            partition: [0.4, 0.2, 0.4],
            subgraph_fraction: 0.2,
            n_graphs: 5,
            context: ContextPolicy::None,
            auto_labels: AutoLabelSource::Arrival,
            attack: AttackConfig::default(),
            inference: InferenceConfig::default(),
            alert: AlertSettings::default(),
            sweep: SweepSettings::default(),
            runtime: RuntimeSettings::default(),
            seed: 0,
            jobs: 1,
            deterministic: false,
            trace: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.classifier.validate()?;
        self.inference.validate()?;
        if !(0.0..=1.0).contains(&self.noise_ratio) {
            return Err(Error::invalid(format!("noise_ratio {} outside [0, 1]", self.noise_ratio)));
        }
        if self.partition.iter().any(|f| !(*f >= 0.0)) || (self.partition.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("partition fractions must be non-negative and sum to 1"));
        }
        if !(self.subgraph_fraction > 0.0 && self.subgraph_fraction <= 1.0) {
            return Err(Error::invalid("subgraph_fraction must lie in (0, 1]"));
        }
        if self.n_graphs == 0 {
            return Err(Error::invalid("n_graphs must be positive"));
        }
        if self.alert.n_graphs == 0 || self.alert.n_perturbed > self.alert.n_graphs || self.alert.outer_seeds == 0 {
            return Err(Error::invalid("alert needs 0 <= n_perturbed <= n_graphs and at least one outer seed"));
        }
        if !(self.attack.epsilon.is_finite() && self.attack.epsilon >= 0.0) {
            return Err(Error::invalid("attack epsilon must be non-negative"));
        }
        if self.jobs == 0 {
            return Err(Error::invalid("jobs must be positive"));
        }
        if self.runtime.repetitions == 0 {
            return Err(Error::invalid("runtime repetitions must be positive"));
        }
        Ok(())
    }

    /// Applies `key=value` overrides with dotted keys (`inference.ws=20`). Values are
    /// parsed as JSON, falling back to a plain string.
    pub fn with_overrides<'a>(&self, overrides: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut tree = serde_json::to_value(self)?;
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("override `{item}` is not key=value")))?;
            let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
            set_dotted(&mut tree, key, value)?;
        }
        let cfg: ExperimentConfig = serde_json::from_value(tree)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Child seed for `role`, derived from the master seed.
    pub fn stream_seed(&self, role: &str, index: u64) -> u64 {
        seed::derive_seed(self.seed, role, index)
    }
}

fn set_dotted(tree: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut node = tree;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::invalid(format!("`{key}`: `{part}` is not inside an object")))?;
        if !obj.contains_key(*part) {
            return Err(Error::invalid(format!("unknown config key `{key}`")));
        }
        if i + 1 == parts.len() {
            obj.insert((*part).to_owned(), value);
            return Ok(());
        }
        node = obj.get_mut(*part).expect("checked");
    }
    Err(Error::invalid("empty config key"))
}
