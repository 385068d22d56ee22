//! Metrics, ROC analysis, the exact-posterior oracle and experiment drivers.

mod experiments;
mod metrics;
mod posterior;
mod roc;

pub use experiments::{
    load_dataset, measure_runtime, prepare, prepare_from, prepare_with_graph, run_ablation, run_ablation_with,
    run_alert_experiment, run_attack_with, run_defense_experiment, run_defense_with, run_sweep, run_sweep_with,
    runtime_csv, sweep_csv, train_metrics, AblationCell, AlertRecord, AlertReport, AttackTrial, DefenseReport,
    DefenseTrial, MeanSd, PreparedExperiment, RuntimeRow, SweepRow, TrainMetrics,
};
pub use metrics::{compute_metrics, mean_and_sd, MetricsReport};
pub use posterior::{exact_posterior, MAX_EXACT_CLASSES, MAX_EXACT_NODES};
pub use roc::{pair_statistic, roc_auc, RocPoint, RocReport};
