//! Independent dense oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use graphss::classifier::{forward, loss_and_gradients, ClassifierParams, ModelInput, Variant};
use graphss::perturb::{attack_lf, AttackConfig, AttackKind, DynamicSubgraph};
use graphss::graph::Graph;
use graphss::seed;
use ndarray::{Array2, Axis};
use rand::Rng;

pub fn dense_adjacency(n: usize, edges: &[(usize, usize)]) -> Array2<f64> {
    let mut a = Array2::zeros((n, n));
    for &(i, j) in edges {
        a[[i, j]] = 1.0;
        a[[j, i]] = 1.0;
    }
    a
}

/// `D^-1/2 (A + I) D^-1/2` on a dense matrix.
pub fn dense_normalize(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let mut t = a.clone();
    for i in 0..n {
        t[[i, i]] += 1.0;
    }
    let d: Vec<f64> = t.sum_axis(Axis(1)).iter().map(|v| 1.0 / v.sqrt()).collect();
    Array2::from_shape_fn((n, n), |(i, j)| d[i] * t[[i, j]] * d[j])
}

pub fn softmax_rows(z: &Array2<f64>) -> Array2<f64> {
    let mut out = z.clone();
    for mut row in out.rows_mut() {
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - m).exp());
        let s = row.sum();
        row.mapv_inplace(|v| v / s);
    }
    out
}

pub fn dense_logits(params: &ClassifierParams, a: &Array2<f64>, x: &Array2<f64>) -> Array2<f64> {
    let s = dense_normalize(a);
    match params.variant {
        Variant::Gcn => {
            let h = s.dot(x).dot(&params.weights[0]).mapv(|v| v.max(0.0));
            s.dot(&h).dot(&params.weights[1])
        }
        Variant::Sgc => {
            let mut p = x.clone();
            for _ in 0..params.sgc_hops {
                p = s.dot(&p);
            }
            p.dot(&params.weights[0])
        }
    }
}

pub fn dense_loss(params: &ClassifierParams, a: &Array2<f64>, x: &Array2<f64>, labels: &[usize], mask: &[usize]) -> f64 {
    let p = softmax_rows(&dense_logits(params, a, x));
    mask.iter().map(|&i| -p[[i, labels[i]]].ln()).sum::<f64>() / mask.len() as f64
}

/// Linearized surrogate loss `-ln softmax(Â^h X W)[n][label]`.
pub fn dense_surrogate_loss(a: &Array2<f64>, x: &Array2<f64>, w: &Array2<f64>, hops: usize, n: usize, label: usize) -> f64 {
    let s = dense_normalize(a);
    let mut p = x.clone();
    for _ in 0..hops {
        p = s.dot(&p);
    }
    let logits = p.dot(w);
    let row = logits.row(n);
    let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
    lse - row[label]
}

pub struct RandomGraph {
    pub graph: Graph,
    pub edges: Vec<(usize, usize)>,
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, d: usize, k: usize, p_edge: f64, binary: bool) -> RandomGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p_edge {
                edges.push((i, j));
            }
        }
    }
    let x = Array2::from_shape_fn((n, d), |_| {
        if binary {
            f64::from(rng.gen::<bool>())
        } else {
            rng.gen_range(-1.0..1.0)
        }
    });
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let graph = Graph::from_edges(k, edges.iter().copied(), x, Some(labels)).unwrap();
    RandomGraph { graph, edges }
}

pub fn random_params<R: Rng>(rng: &mut R, variant: Variant, d: usize, hidden: usize, k: usize) -> ClassifierParams {
    let mut p = ClassifierParams::glorot(variant, d, hidden, k, 2, rng);
    for w in &mut p.weights {
        w.mapv_inplace(|v| v * 3.0);
    }
    p
}

/// Posterior marginals by enumeration, with the Dirichlet-multinomial term written as
/// rising factorials `Γ(a + c) / Γ(a) = a (a+1) ... (a+c-1)`.
pub fn enumerated_marginals(probs: &Array2<f64>, y: &[usize], alpha: &[f64]) -> Array2<f64> {
    let (n, k) = probs.dim();
    let rising = |a: f64, c: usize| (0..c).map(|i| a + i as f64).product::<f64>();
    let a_sum: f64 = alpha.iter().sum();
    let total = k.pow(n as u32);
    let mut weights = Vec::with_capacity(total);
    for code in 0..total {
        let z: Vec<usize> = (0..n).map(|i| (code / k.pow(i as u32)) % k).collect();
        let mut c = vec![vec![0usize; k]; k];
        for i in 0..n {
            c[z[i]][y[i]] += 1;
        }
        let mut w: f64 = (0..n).map(|i| probs[[i, z[i]]]).product();
        for row in &c {
            let num: f64 = row.iter().zip(alpha).map(|(&cnt, &a)| rising(a, cnt)).product();
            w *= num / rising(a_sum, row.iter().sum());
        }
        weights.push((z, w));
    }
    let norm: f64 = weights.iter().map(|(_, w)| w).sum();
    let mut m = Array2::zeros((n, k));
    for (z, w) in &weights {
        for i in 0..n {
            m[[i, z[i]]] += w / norm;
        }
    }
    m
}

pub fn random_stochastic<R: Rng>(rng: &mut R, n: usize, k: usize) -> Array2<f64> {
    let mut p = Array2::from_shape_fn((n, k), |_| rng.gen_range(0.05..1.0));
    for mut row in p.rows_mut() {
        let s = row.sum();
        row.mapv_inplace(|v| v / s);
    }
    p
}

pub fn rng(seed_value: u64) -> seed::Rng {
    seed::rng_from_seed(seed_value)
}

/// Flip `(kind, local target)` pairs chosen by an exhaustive re-evaluation greedy.
pub fn brute_force_greedy(
    a: &mut Array2<f64>,
    x: &mut Array2<f64>,
    w: &Array2<f64>,
    hops: usize,
    victims: &[usize],
    predicted: &[usize],
    n_pert: usize,
    feature_budget: usize,
) -> Vec<(AttackKind, usize)> {
    let n = a.nrows();
    let d = x.ncols();
    let mut chosen = Vec::new();
    for &v in victims {
        let (mut eb, mut fb) = (n_pert, feature_budget);
        let mut used_e = vec![false; n];
        used_e[v] = true;
        let mut used_f = vec![false; d];
        while eb + fb > 0 {
            let mut best: Option<(f64, AttackKind, usize)> = None;
            if eb > 0 {
                for u in (0..n).filter(|&u| !used_e[u]) {
                    let old = a[[v, u]];
                    a[[v, u]] = 1.0 - old;
                    a[[u, v]] = 1.0 - old;
                    let loss = dense_surrogate_loss(a, x, w, hops, v, predicted[v]);
                    a[[v, u]] = old;
                    a[[u, v]] = old;
                    if best.as_ref().map_or(true, |b| loss > b.0 + 1e-9 * b.0.abs().max(1.0)) {
                        best = Some((loss, AttackKind::Edge, u));
                    }
                }
            }
            if fb > 0 {
                for j in (0..d).filter(|&j| !used_f[j]) {
                    let old = x[[v, j]];
                    x[[v, j]] = 1.0 - old;
                    let loss = dense_surrogate_loss(a, x, w, hops, v, predicted[v]);
                    x[[v, j]] = old;
                    if best.as_ref().map_or(true, |b| loss > b.0 + 1e-9 * b.0.abs().max(1.0)) {
                        best = Some((loss, AttackKind::Feature, j));
                    }
                }
            }
            let Some((_, kind, t)) = best else { break };
            match kind {
                AttackKind::Edge => {
                    let old = a[[v, t]];
                    a[[v, t]] = 1.0 - old;
                    a[[t, v]] = 1.0 - old;
                    used_e[t] = true;
                    eb -= 1;
                }
                AttackKind::Feature => {
                    x[[v, t]] = 1.0 - x[[v, t]];
                    used_f[t] = true;
                    fb -= 1;
                }
            }
            if eb > 0 && used_e.iter().all(|&u| u) {
                eb = 0;
            }
            if fb > 0 && used_f.iter().all(|&u| u) {
                fb = 0;
            }
            chosen.push((kind, t));
        }
    }
    chosen
}

/// Runs the attack on one random graph of at most 6 nodes and compares the log, the
/// final features and the final adjacency with the exhaustive greedy. `None` when the
/// draw has no victims.
pub fn attack_matches_oracle(s: u64) -> Option<bool> {
    let mut r = rng(900 + s);
    let n = r.gen_range(3..7);
    let d = r.gen_range(2..5);
    let variant = if s % 2 == 0 { Variant::Gcn } else { Variant::Sgc };
    let g = random_graph(&mut r, n, d, 2, 0.4, true);
    let params = random_params(&mut r, variant, d, 3, 2);
    let victims: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.5)).collect();
    if victims.is_empty() {
        return None;
    }
    let context: Vec<usize> = (0..n).filter(|i| !victims.contains(i)).collect();
    let sub = DynamicSubgraph::new(&g.graph, victims, context).unwrap();
    let cfg = AttackConfig {
        n_pert: 1,
        feature_multiplier: 2,
        ..Default::default()
    };
    let attacked = attack_lf(&sub, &params, &cfg).unwrap();

    let view = &sub.graph_view;
    let mut a = dense_adjacency(view.num_nodes(), &view.edges().collect::<Vec<_>>());
    let mut x = view.features().clone();
    let predicted = forward(&params, &ModelInput::from_graph(view)).unwrap().labels;
    let hops = match variant {
        Variant::Gcn => 2,
        Variant::Sgc => params.sgc_hops,
    };
    let want = brute_force_greedy(&mut a, &mut x, &params.collapsed_weights(), hops, &sub.targets(), &predicted, 1, 2);
    let got: Vec<(AttackKind, usize)> = attacked
        .attack_log
        .iter()
        .map(|rec| {
            let t = match rec.kind {
                AttackKind::Edge => (0..view.num_nodes()).find(|&l| sub.global_id(l) == rec.target).unwrap(),
                AttackKind::Feature => rec.target,
            };
            (rec.kind, t)
        })
        .collect();
    let final_a = dense_adjacency(view.num_nodes(), &attacked.graph_view.edges().collect::<Vec<_>>());
    Some(got == want && attacked.graph_view.features() == &x && final_a == a)
}

pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    if scale < 1e-12 {
        diff
    } else {
        diff / scale
    }
}

/// Norm-wise relative error between analytic and central-difference gradients on one
/// random instance.
pub fn gradient_error(variant: Variant, seed_value: u64) -> f64 {
    let mut r = rng(seed_value);
    let n = r.gen_range(3..9);
    let d = r.gen_range(2..6);
    let k = r.gen_range(2..5);
    let hidden = r.gen_range(2..6);
    let g = random_graph(&mut r, n, d, k, 0.4, false);
    let mut params = random_params(&mut r, variant, d, hidden, k);
    let labels = g.graph.latent_labels().unwrap().to_vec();
    let mask: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.7)).chain([0]).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let input = ModelInput::from_graph(&g.graph);
    let (_, grads) = loss_and_gradients(&params, &input, &labels, &mask).unwrap();

    let a = dense_adjacency(n, &g.edges);
    let h = 1e-6;
    let mut analytic = Vec::new();
    let mut numeric = Vec::new();
    for l in 0..params.weights.len() {
        for idx in 0..params.weights[l].len() {
            let (i, j) = (idx / params.weights[l].ncols(), idx % params.weights[l].ncols());
            let orig = params.weights[l][[i, j]];
            params.weights[l][[i, j]] = orig + h;
            let up = dense_loss(&params, &a, g.graph.features(), &labels, &mask);
            params.weights[l][[i, j]] = orig - h;
            let down = dense_loss(&params, &a, g.graph.features(), &labels, &mask);
            params.weights[l][[i, j]] = orig;
            numeric.push((up - down) / (2.0 * h));
            analytic.push(grads[l][[i, j]]);
        }
    }
    relative_error(&analytic, &numeric)
}
