//! Grid over warm-up length and retraining budget on the validation split.
//!
//! ```bash
//! cargo run --release --example parameter_sweep
//! ```

use graphss::config::ExperimentConfig;
use graphss::eval::{prepare, run_sweep_with, sweep_csv};

fn main() -> graphss::Result<()> {
    let cfg = ExperimentConfig {
        jobs: 4,
        ..Default::default()
    };
    let prep = prepare(&cfg)?;
    let rows = run_sweep_with(&prep, &cfg, &[5, 20, 40], &[20, 60, 100])?;
    print!("{}", sweep_csv(&rows));
    Ok(())
}
