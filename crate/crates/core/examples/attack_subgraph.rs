//! Attacks sampled test subgraphs and prints the accuracy drop and the first flips.
//!
//! ```bash
//! cargo run --release --example attack_subgraph -- 2
//! ```

use graphss::config::ExperimentConfig;
use graphss::eval::{prepare, run_attack_with};

fn main() -> graphss::Result<()> {
    let mut cfg = ExperimentConfig::default();
    if let Some(n) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.attack.n_pert = n;
    }
    let prep = prepare(&cfg)?;
    let (trials, attacked) = run_attack_with(&prep, &cfg)?;
    for t in &trials {
        println!(
            "subgraph {}: {} nodes, clean {:.3} attacked {:.3}, {} flips, shortfall {}",
            t.index,
            t.node_ids.len(),
            t.clean.accuracy,
            t.attacked.accuracy,
            t.flips,
            t.shortfall
        );
    }
    for line in attacked[0].attack_log_jsonl().lines().take(5) {
        println!("{line}");
    }
    Ok(())
}
