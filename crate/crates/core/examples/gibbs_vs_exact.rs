//! Runs the collapsed Gibbs sampler on a tiny instance and compares its marginals with
//! exhaustive enumeration.
//!
//! ```bash
//! cargo run --release --example gibbs_vs_exact
//! ```

use graphss::eval::exact_posterior;
use graphss::inference::{gibbs_sweep, ConfusionCounts, InferenceState, Mode, TransitionModel};
use graphss::seed;
use ndarray::array;

fn main() -> graphss::Result<()> {
    let probs = array![[0.7, 0.2, 0.1], [0.3, 0.4, 0.3], [0.1, 0.1, 0.8], [0.5, 0.45, 0.05]];
    let noisy = [0, 1, 2, 1];
    let alpha = [1.0; 3];
    let exact = exact_posterior(&probs, &noisy, &alpha)?;

    let (burn_in, sweeps) = (1_000, 100_000);
    let mut rng = seed::stream(0, "gibbs", 0);
    let mut state = InferenceState::new(noisy.to_vec(), 3, Mode::Alert, burn_in, burn_in + sweeps, 0);
    let mut live = TransitionModel::new(alpha.to_vec(), ConfusionCounts::from_pairs(3, &state.assignments, &noisy)?)?;
    let prior = TransitionModel::uniform_prior(3, 1.0)?;
    for _ in 0..burn_in + sweeps {
        gibbs_sweep(&mut state, &probs, &noisy, &mut live, false, &prior, &mut rng)?;
    }
    let sampled = state.marginals();
    for i in 0..probs.nrows() {
        let tv: f64 = 0.5 * (0..3).map(|k| (sampled[[i, k]] - exact[[i, k]]).abs()).sum::<f64>();
        println!("node {i}: exact {:.4} sampled {:.4} tv {tv:.4}", exact.row(i), sampled.row(i));
    }
    Ok(())
}
