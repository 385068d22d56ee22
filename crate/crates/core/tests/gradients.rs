mod common;

use common::*;
use graphss::classifier::{forward, ModelInput, Variant};
use rand::Rng;

#[test]
fn gcn_gradients_match_finite_differences() {
    for s in 0..25 {
        let e = gradient_error(Variant::Gcn, s);
        assert!(e < 1e-4, "instance {s}: relative error {e}");
    }
}

#[test]
fn sgc_gradients_match_finite_differences() {
    for s in 100..125 {
        let e = gradient_error(Variant::Sgc, s);
        assert!(e < 1e-4, "instance {s}: relative error {e}");
    }
}

#[test]
fn forward_matches_dense_oracle() {
    for s in 0..40u64 {
        let mut r = rng(500 + s);
        let n = r.gen_range(1..6);
        let variant = if s % 2 == 0 { Variant::Gcn } else { Variant::Sgc };
        let g = random_graph(&mut r, n, 3, 3, 0.5, s % 3 == 0);
        let params = random_params(&mut r, variant, 3, 4, 3);
        let got = forward(&params, &ModelInput::from_graph(&g.graph)).unwrap();
        let want = softmax_rows(&dense_logits(&params, &dense_adjacency(n, &g.edges), g.graph.features()));
        for (a, b) in got.probs.iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-12, "instance {s}: {a} vs {b}");
        }
    }
}
