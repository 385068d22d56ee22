//! Fixed versus dynamic transition matrix, with and without retraining.
//!
//! ```bash
//! cargo run --release --example ablation
//! ```

use graphss::config::ExperimentConfig;
use graphss::eval::{prepare, run_ablation_with};

fn main() -> graphss::Result<()> {
    let cfg = ExperimentConfig {
        jobs: 4,
        ..Default::default()
    };
    let prep = prepare(&cfg)?;
    for cell in run_ablation_with(&prep, &cfg)? {
        println!(
            "{:7} transition, {:10}: {:.3} ± {:.3}",
            if cell.dynamic_transition { "dynamic" } else { "fixed" },
            if cell.retrain { "retrain" } else { "no retrain" },
            cell.accuracy.mean,
            cell.accuracy.sd
        );
    }
    Ok(())
}
