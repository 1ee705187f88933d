//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use chanlife::network::{DiGraph, PaymentGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every simple path from `s` to `t`, as edge id lists.
fn simple_paths(g: &DiGraph, s: usize, t: usize) -> Vec<Vec<usize>> {
    fn dfs(g: &DiGraph, v: usize, t: usize, seen: &mut Vec<bool>, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if v == t {
            out.push(path.clone());
            return;
        }
        for &(w, e) in g.out_edges(v) {
            if !seen[w] {
                seen[w] = true;
                path.push(e);
                dfs(g, w, t, seen, path, out);
                path.pop();
                seen[w] = false;
            }
        }
    }
    let mut seen = vec![false; g.node_count()];
    seen[s] = true;
    let mut out = Vec::new();
    dfs(g, s, t, &mut seen, &mut Vec::new(), &mut out);
    out
}

/// Shortest `s -> t` paths found by exhaustive enumeration.
pub fn shortest_paths(g: &DiGraph, s: usize, t: usize) -> Vec<Vec<usize>> {
    let all = simple_paths(g, s, t);
    let Some(best) = all.iter().map(Vec::len).min() else {
        return Vec::new();
    };
    all.into_iter().filter(|p| p.len() == best).collect()
}

/// `sum_{s != t} w(s,t) * (shortest s-t paths through e) / (shortest s-t paths)`
/// per directed edge, by enumeration.
pub fn brute_force_weighted(g: &DiGraph, w: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut acc = vec![0.0; g.edge_count()];
    for s in 0..g.node_count() {
        for t in 0..g.node_count() {
            if s == t {
                continue;
            }
            let paths = shortest_paths(g, s, t);
            if paths.is_empty() {
                continue;
            }
            let total = paths.len() as f64;
            let mut through = vec![0usize; g.edge_count()];
            for p in &paths {
                for &e in p {
                    through[e] += 1;
                }
            }
            for (e, &k) in through.iter().enumerate() {
                if k > 0 {
                    acc[e] += w(s, t) * k as f64 / total;
                }
            }
        }
    }
    acc
}

pub fn brute_force_betweenness(g: &DiGraph) -> Vec<f64> {
    brute_force_weighted(g, |_, _| 1.0)
}

/// Random directed graph on `n` nodes, each ordered pair present with `prob`.
pub fn random_digraph(n: usize, prob: f64, seed: u64) -> DiGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = DiGraph::new(n);
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(prob) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Random channel graph on `n` nodes, each unordered pair present with `prob`.
pub fn random_channels(n: usize, prob: f64, fund: u64, seed: u64) -> PaymentGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = PaymentGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(prob) {
                g.add_channel(u, v, fund, fund).unwrap();
            }
        }
    }
    g
}

/// Solves `s_x = 1 + q s_{x-1} + p s_{x+1}` on `-b < x < a` with
/// `s_{-b} = s_a = 0` by Gaussian elimination on the tridiagonal system.
/// Index `i` of the result is position `x = i - b`.
pub fn recurrence_solution(p: f64, a: u64, b: u64) -> Vec<f64> {
    let q = 1.0 - p;
    let n = (a + b + 1) as usize;
    let interior = n - 2;
    // row i (position i+1): -q s_{i} + s_{i+1} - p s_{i+2} = 1
    let mut diag = vec![1.0; interior];
    let mut rhs = vec![1.0; interior];
    let lower = -q;
    let upper = -p;
    for i in 1..interior {
        let m = lower / diag[i - 1];
        diag[i] -= m * upper;
        rhs[i] -= m * rhs[i - 1];
    }
    let mut s = vec![0.0; n];
    for i in (0..interior).rev() {
        let next = if i + 1 < interior { s[i + 2] } else { 0.0 };
        s[i + 1] = (rhs[i] - upper * next) / diag[i];
    }
    s
}

/// Long-run failure rate of a lone channel of `k` payment units: the balance
/// chain on A's units is birth-death with stationary weights `(q/p)^i`, and
/// a payment fails when the sending side is empty.
pub fn stationary_failure_rate(p: f64, k: usize) -> f64 {
    let q = 1.0 - p;
    let weights: Vec<f64> = (0..=k).map(|i| (q / p).powi(i as i32)).collect();
    let total: f64 = weights.iter().sum();
    (weights[0] * p + weights[k] * q) / total
}
