//! Alert mode: score every subgraph by transition drift and report the ROC.
//!
//! ```bash
//! cargo run --release --example alert_roc
//! ```

use graphss::config::ExperimentConfig;
use graphss::eval::run_alert_experiment;

fn main() -> graphss::Result<()> {
    let mut cfg = ExperimentConfig {
        jobs: 4,
        ..Default::default()
    };
    cfg.alert.outer_seeds = 2;
    let report = run_alert_experiment(&cfg)?;
    for r in &report.records {
        println!(
            "seed {} subgraph {} perturbed {:5}: drift {:.3} disagreement {:.3}",
            r.outer, r.index, r.perturbed, r.score, r.disagreement
        );
    }
    println!("pooled AUC {:.3}", report.roc.auc);
    if let Some(d) = &report.disagreement_roc {
        println!("disagreement AUC {:.3}", d.auc);
    }
    print!("{}", report.roc.points_csv());
    Ok(())
}
