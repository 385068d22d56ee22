use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Disjoint train/validation/test node sets, each sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub train_ids: Vec<usize>,
    pub val_ids: Vec<usize>,
    pub test_ids: Vec<usize>,
}

/// Part sizes for `n` items: every part but the last gets `floor(f * n)`, the last
/// takes the remainder.
pub fn split_sizes(n: usize, fractions: &[f64]) -> Result<Vec<usize>> {
    if fractions.is_empty() {
        return Err(Error::invalid("no fractions given"));
    }
    if let Some(f) = fractions.iter().find(|f| !(f.is_finite() && **f >= 0.0)) {
        return Err(Error::invalid(format!("fraction {f} must be a non-negative number")));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("fractions sum to {total}, expected 1")));
    }
    let mut sizes: Vec<usize> = fractions[..fractions.len() - 1]
        .iter()
        .map(|f| (f * n as f64 + 1e-9).floor() as usize)
        .collect();
    let used: usize = sizes.iter().sum();
    if used > n {
        return Err(Error::invalid("fractions exceed the node count"));
    }
    sizes.push(n - used);
    Ok(sizes)
}

/// Uniformly shuffles `0..num_nodes` with `seed` and splits it into train, validation
/// and test parts.
pub fn partition_nodes(num_nodes: usize, fractions: (f64, f64, f64), seed: u64) -> Result<Partition> {
    let sizes = split_sizes(num_nodes, &[fractions.0, fractions.1, fractions.2])?;
    let mut order: Vec<usize> = (0..num_nodes).collect();
    order.shuffle(&mut seed::rng_from_seed(seed));
    let mut train_ids = order[..sizes[0]].to_vec();
    let mut val_ids = order[sizes[0]..sizes[0] + sizes[1]].to_vec();
    let mut test_ids = order[sizes[0] + sizes[1]..].to_vec();
    train_ids.sort_unstable();
    val_ids.sort_unstable();
    test_ids.sort_unstable();
    Ok(Partition {
        train_ids,
        val_ids,
        test_ids,
    })
}
