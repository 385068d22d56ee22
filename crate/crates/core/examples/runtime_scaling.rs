//! Wall-clock inference time per 100 evaluation nodes as the SBM grows.
//!
//! ```bash
//! cargo run --release --example runtime_scaling
//! ```

use graphss::config::ExperimentConfig;
use graphss::eval::{measure_runtime, runtime_csv};

fn main() -> graphss::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.runtime.repetitions = 2;
    let rows = measure_runtime(&cfg, &[250, 500, 1000, 2000])?;
    print!("{}", runtime_csv(&rows));
    Ok(())
}
