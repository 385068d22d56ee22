//! Exact posterior over inferred labels by enumeration, for small instances.
//!
//! With the transition rows integrated out under their Dirichlet prior,
//! `P(Z | V, Y; α) ∝ Π_n P̄(z_n | v_n) · Π_k [Π_k' Γ(α_k' + C_kk') / Γ(Σ_k' (α_k' + C_kk'))]`
//! where `C` is the confusion of `(z, y)` pairs.

use ndarray::Array2;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const MAX_EXACT_NODES: usize = 8;
pub const MAX_EXACT_CLASSES: usize = 4;

/// Per-node posterior marginals by summing over all `K^N` assignments.
pub fn exact_posterior(class_probs: &Array2<f64>, noisy_labels: &[usize], alpha: &[f64]) -> Result<Array2<f64>> {
    let (n, k) = class_probs.dim();
    if n > MAX_EXACT_NODES || k > MAX_EXACT_CLASSES {
        return Err(Error::InstanceTooLarge { nodes: n, classes: k });
    }
    if noisy_labels.len() != n || alpha.len() != k {
        return Err(Error::dim("posterior inputs disagree on shape"));
    }
    if noisy_labels.iter().any(|&y| y >= k) {
        return Err(Error::invalid("noisy label out of range"));
    }
    let alpha_sum: f64 = alpha.iter().sum();
    let total = k.pow(n as u32);
    let mut log_p = Vec::with_capacity(total);
    let mut z = vec![0usize; n];
    let mut counts = vec![0u64; k * k];
    for code in 0..total {
        let mut c = code;
        for zi in z.iter_mut() {
            *zi = c % k;
            c /= k;
        }
        counts.iter_mut().for_each(|v| *v = 0);
        let mut lp = 0.0;
        for (i, (&zi, &yi)) in z.iter().zip(noisy_labels).enumerate() {
            counts[zi * k + yi] += 1;
            lp += class_probs[[i, zi]].ln();
        }
        for row in 0..k {
            let mut row_total = 0u64;
            for col in 0..k {
                let c = counts[row * k + col];
                row_total += c;
                lp += ln_gamma(alpha[col] + c as f64);
            }
            lp -= ln_gamma(alpha_sum + row_total as f64);
        }
        log_p.push(lp);
    }
    let max = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::invalid("every assignment has zero probability"));
    }
    let weights: Vec<f64> = log_p.iter().map(|v| (v - max).exp()).collect();
    let norm: f64 = weights.iter().sum();

    let mut marginals = Array2::<f64>::zeros((n, k));
    for (code, w) in weights.iter().enumerate() {
        let mut c = code;
        for i in 0..n {
            marginals[[i, c % k]] += w / norm;
            c /= k;
        }
    }
    Ok(marginals)
}
