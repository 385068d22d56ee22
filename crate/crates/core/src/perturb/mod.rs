//! Label noise, dynamic subgraph sampling and the link-and-feature evasion attack.

mod attack;
mod noise;
mod subgraph;

pub use attack::{attack_lf, AttackConfig, AttackKind, AttackOp, AttackRecord, FeatureMode};
pub use noise::{inject_label_noise, NoisyLabels};
pub use subgraph::{round_half_up, sample_subgraphs, DynamicSubgraph};
