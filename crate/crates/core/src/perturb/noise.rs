use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Simulated manual annotations: a fixed fraction of labels replaced by a uniformly
/// chosen different class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisyLabels {
    pub values: Vec<usize>,
    pub noise_ratio: f64,
    pub flipped_ids: Vec<usize>,
}

pub fn inject_label_noise(
    latent: &[usize],
    noise_ratio: f64,
    num_classes: usize,
    seed: u64,
) -> Result<NoisyLabels> {
    if !(0.0..=1.0).contains(&noise_ratio) {
        return Err(Error::invalid(format!("noise ratio {noise_ratio} outside [0, 1]")));
    }
    if let Some(&l) = latent.iter().find(|&&l| l >= num_classes) {
        return Err(Error::invalid(format!("label {l} not below {num_classes}")));
    }
    let n = latent.len();
    let flips = (noise_ratio * n as f64).round() as usize;
    if flips > 0 && num_classes < 2 {
        return Err(Error::invalid("label noise needs at least two classes"));
    }
    let mut rng = seed::rng_from_seed(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut flipped_ids = order[..flips].to_vec();
    flipped_ids.sort_unstable();

    let mut values = latent.to_vec();
    for &i in &flipped_ids {
        let r = rng.gen_range(0..num_classes - 1);
        values[i] = if r >= latent[i] { r + 1 } else { r };
    }
    Ok(NoisyLabels {
        values,
        noise_ratio,
        flipped_ids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_ratio_is_identity() {
        let latent = vec![0, 1, 2, 1];
        let n = inject_label_noise(&latent, 0.0, 3, 1).unwrap();
        assert_eq!(n.values, latent);
        assert!(n.flipped_ids.is_empty());
    }

    #[test]
    fn full_ratio_binary_complements() {
        let latent = vec![0, 1, 1, 0, 1];
        let n = inject_label_noise(&latent, 1.0, 2, 9).unwrap();
        assert_eq!(n.values, vec![1, 0, 0, 1, 0]);
    }

    #[test]
    fn one_class_cannot_be_flipped() {
        assert!(inject_label_noise(&[0, 0], 0.5, 1, 0).is_err());
        assert!(inject_label_noise(&[0, 0], 0.0, 1, 0).is_ok());
        assert!(inject_label_noise(&[0, 0], 1.5, 2, 0).is_err());
    }

    #[test]
    fn exact_count_and_uniform_destinations() {
        let k = 4;
        let latent: Vec<usize> = (0..1000).map(|i| i % k).collect();
        // Destination counts for nodes of latent class 0 pooled over seeds.
        let mut dest = [0usize; 4];
        let seeds = 40;
        for s in 0..seeds {
            let n = inject_label_noise(&latent, 0.1, k, s).unwrap();
            assert_eq!(n.flipped_ids.len(), 100);
            for i in 0..latent.len() {
                let flipped = n.flipped_ids.binary_search(&i).is_ok();
                assert_eq!(flipped, n.values[i] != latent[i]);
            }
            for &i in &n.flipped_ids {
                if latent[i] == 0 {
                    dest[n.values[i]] += 1;
                }
            }
        }
        assert_eq!(dest[0], 0);
        let total: usize = dest.iter().sum();
        let p = 1.0 / 3.0;
        let mean = total as f64 * p;
        let sigma = (total as f64 * p * (1.0 - p)).sqrt();
        for &c in &dest[1..] {
            assert!((c as f64 - mean).abs() <= 4.0 * sigma, "{dest:?}");
        }
    }
}
