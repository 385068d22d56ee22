//! Defense mode: infer labels for attacked subgraphs while retraining on the samples.
//!
//! ```bash
//! cargo run --release --example defend -- 3
//! ```

use graphss::config::ExperimentConfig;
use graphss::eval::{prepare, run_defense_with};

fn main() -> graphss::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let cfg = ExperimentConfig {
        seed,
        jobs: 4,
        ..Default::default()
    };
    let prep = prepare(&cfg)?;
    let report = run_defense_with(&prep, &cfg)?;
    for t in &report.trials {
        println!(
            "subgraph {}: original {:.3} attack {:.3} graphss {:.3} ({} retrain steps)",
            t.index, t.original.accuracy, t.attack.accuracy, t.graphss.accuracy, t.retrain_steps
        );
    }
    println!(
        "mean: original {:.3} attack {:.3} graphss {:.3}, recovered {:.0}% of the drop",
        report.original.mean,
        report.attack.mean,
        report.graphss.mean,
        100.0 * report.recovery()
    );
    Ok(())
}
