mod common;

use common::*;
use graphss::eval::exact_posterior;
use graphss::inference::{gibbs_sweep, ConfusionCounts, InferenceState, Mode, TransitionModel};
use ndarray::{array, Array2};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn two_node_example_agrees_with_second_enumeration() {
    let p = array![[0.9, 0.1], [0.5, 0.5]];
    let got = exact_posterior(&p, &[0, 0], &[1.0, 1.0]).unwrap();
    let want = enumerated_marginals(&p, &[0, 0], &[1.0, 1.0]);
    for (a, b) in got.iter().zip(want.iter()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn random_instances_agree_with_second_enumeration() {
    for s in 0..30u64 {
        let mut r = rng(s);
        let n = r.gen_range(1..7);
        let k = r.gen_range(2..5);
        let p = random_stochastic(&mut r, n, k);
        let y: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
        let alpha: Vec<f64> = (0..k).map(|_| r.gen_range(0.3..3.0)).collect();
        let got = exact_posterior(&p, &y, &alpha).unwrap();
        let want = enumerated_marginals(&p, &y, &alpha);
        for (a, b) in got.iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-12, "instance {s}: {a} vs {b}");
        }
    }
}

#[test]
fn short_chain_tracks_exact_marginals() {
    let mut r = rng(3);
    let p = random_stochastic(&mut r, 4, 2);
    let y = vec![0, 1, 1, 0];
    let exact = exact_posterior(&p, &y, &[1.0, 1.0]).unwrap();
    let mut state = InferenceState::new(vec![0; 4], 2, Mode::Alert, 500, 40_500, 0);
    let mut dynamic = TransitionModel::new(vec![1.0, 1.0], ConfusionCounts::from_pairs(2, &state.assignments, &y).unwrap()).unwrap();
    let warm = TransitionModel::uniform_prior(2, 1.0).unwrap();
    for _ in 0..40_500 {
        gibbs_sweep(&mut state, &p, &y, &mut dynamic, false, &warm, &mut r).unwrap();
    }
    let m = state.marginals();
    for i in 0..4 {
        let tv = 0.5 * (0..2).map(|k| (m[[i, k]] - exact[[i, k]]).abs()).sum::<f64>();
        assert!(tv < 0.03, "node {i}: tv {tv}");
    }
}

#[test]
fn counts_are_conserved_over_sweeps() {
    let mut r = rng(11);
    let (n, k) = (7, 3);
    let p = random_stochastic(&mut r, n, k);
    let y: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
    let mut state = InferenceState::new(y.clone(), k, Mode::Alert, 10, 2_000, 0);
    let mut dynamic = TransitionModel::new(vec![1.0; k], ConfusionCounts::from_pairs(k, &y, &y).unwrap()).unwrap();
    let warm = TransitionModel::uniform_prior(k, 1.0).unwrap();
    for e in 0..2_000 {
        gibbs_sweep(&mut state, &p, &y, &mut dynamic, e < 10, &warm, &mut r).unwrap();
        assert_eq!(dynamic.counts.total(), n as u64);
        assert_eq!(dynamic.counts, ConfusionCounts::from_pairs(k, &state.assignments, &y).unwrap());
    }
}

fn permute(p: &Array2<f64>, y: &[usize], alpha: &[f64], perm: &[usize]) -> (Array2<f64>, Vec<usize>, Vec<f64>) {
    let k = perm.len();
    let mut p2 = Array2::zeros(p.dim());
    let mut a2 = vec![0.0; k];
    for c in 0..k {
        p2.column_mut(perm[c]).assign(&p.column(c));
        a2[perm[c]] = alpha[c];
    }
    (p2, y.iter().map(|&v| perm[v]).collect(), a2)
}

proptest! {
    #[test]
    fn marginals_sum_to_one_and_are_equivariant(
        s in 0u64..10_000,
        n in 1usize..6,
        k in 2usize..4,
        shift in 1usize..3,
    ) {
        let mut r = rng(s);
        let p = random_stochastic(&mut r, n, k);
        let y: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
        let alpha: Vec<f64> = (0..k).map(|_| r.gen_range(0.5..2.0)).collect();
        let m = exact_posterior(&p, &y, &alpha).unwrap();
        for row in m.rows() {
            prop_assert!((row.sum() - 1.0).abs() < 1e-12);
        }
        let perm: Vec<usize> = (0..k).map(|c| (c + shift) % k).collect();
        let (p2, y2, a2) = permute(&p, &y, &alpha, &perm);
        let m2 = exact_posterior(&p2, &y2, &a2).unwrap();
        for i in 0..n {
            for c in 0..k {
                prop_assert!((m[[i, c]] - m2[[i, perm[c]]]).abs() < 1e-12);
            }
        }
    }
}
