mod common;

use chanlife::lifespan::{expected_steps_from, WalkParams};
use chanlife::network::{edge_betweenness, edge_payment_rates, undirected_channel_betweenness, RatesMatrix};
use chanlife::rng;
use chanlife::simulator::{single_channel_experiment, ShortestPathIndex};
use common::*;
use rand::Rng;

#[test]
fn brandes_matches_enumeration_on_small_digraphs() {
    for seed in 0..100 {
        let n = 2 + (seed as usize % 7);
        let g = random_digraph(n, 0.35, seed);
        let fast = edge_betweenness(&g).into_values();
        let slow = brute_force_betweenness(&g);
        for (e, (x, y)) in fast.iter().zip(&slow).enumerate() {
            assert!((x - y).abs() < 1e-12, "graph {seed} edge {e}: {x} vs {y}");
        }
    }
}

#[test]
fn weighted_rates_match_enumeration() {
    for seed in 0..40 {
        let g = random_channels(7, 0.4, 10, seed);
        let mut r = rng::stream(seed, 99);
        let mut rates = RatesMatrix::zeros(7);
        for s in 0..7 {
            for t in 0..7 {
                if s != t {
                    rates.set(s, t, r.random_range(0.0..3.0)).unwrap();
                }
            }
        }
        let fast = edge_payment_rates(&g, &rates).unwrap();
        let slow = brute_force_weighted(g.digraph(), |s, t| rates.get(s, t));
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).abs() < 1e-12 * y.max(1.0));
        }
    }
}

#[test]
fn directed_and_undirected_betweenness_agree_on_channel_graphs() {
    for seed in 0..100 {
        let g = random_channels(3 + seed as usize % 6, 0.5, 10, seed);
        let directed = edge_betweenness(g.digraph());
        let undirected = undirected_channel_betweenness(&g);
        for (c, u) in undirected.iter().enumerate() {
            let fwd = directed.of(2 * c);
            let back = directed.of(2 * c + 1);
            assert!((fwd - u).abs() < 1e-12 && (back - u).abs() < 1e-12, "graph {seed} channel {c}");
        }
    }
}

#[test]
fn path_counts_match_enumeration() {
    for seed in 0..30 {
        let g = random_channels(8, 0.45, 10, seed);
        let index = ShortestPathIndex::new(&g);
        for s in 0..8 {
            for t in 0..8 {
                if s != t {
                    let expected = shortest_paths(g.digraph(), s, t).len() as f64;
                    assert_eq!(index.path_count(s, t), expected);
                    assert_eq!(index.enumerate_paths(s, t, 10_000).len() as f64, expected);
                }
            }
        }
    }
}

#[test]
fn sampled_paths_are_uniform() {
    // a 3 x 3 grid: six shortest corner-to-corner paths
    let mut g = chanlife::network::PaymentGraph::new(9);
    for r in 0..3 {
        for c in 0..3 {
            let v = r * 3 + c;
            if c < 2 {
                g.add_channel(v, v + 1, 1, 1).unwrap();
            }
            if r < 2 {
                g.add_channel(v, v + 3, 1, 1).unwrap();
            }
        }
    }
    let index = ShortestPathIndex::new(&g);
    let paths = index.enumerate_paths(0, 8, 100);
    assert_eq!(paths.len(), 6);
    let mut counts = vec![0u32; 6];
    let mut r = rng::stream(5, 0);
    let trials = 60_000;
    for _ in 0..trials {
        let p = index.sample_path(0, 8, &mut r).unwrap();
        counts[paths.iter().position(|q| *q == p).unwrap()] += 1;
    }
    let expected = trials as f64 / 6.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 1% critical value, 5 degrees of freedom
    assert!(chi2 < 15.086, "chi2 = {chi2}, counts {counts:?}");
}

#[test]
fn closed_form_matches_recurrence_everywhere() {
    let sizes: Vec<u64> = (1..=10).chain([20]).collect();
    for pi in 1..=9 {
        let p = pi as f64 / 10.0;
        for &a in &sizes {
            for &b in &sizes {
                let oracle = recurrence_solution(p, a, b);
                for (i, &expected) in oracle.iter().enumerate() {
                    let x = i as i64 - b as i64;
                    let walk = WalkParams::new(p, a, b).unwrap().starting_at(x).unwrap();
                    let got = expected_steps_from(&walk).unwrap();
                    let scale = expected.abs().max(1e-300);
                    assert!(
                        got == expected || (got - expected).abs() / scale < 1e-8,
                        "p={p} a={a} b={b} x={x}: {got} vs {expected}"
                    );
                }
            }
        }
    }
}

#[test]
fn two_unit_channel_failure_rate_matches_markov_chain() {
    for p in [0.5, 0.7] {
        let runs: Vec<f64> = (0..40)
            .map(|s| single_channel_experiment(p, 120_000, 60_000, 5_000, rng::derive(1, s)).unwrap().failure_rate)
            .collect();
        let mean = runs.iter().sum::<f64>() / runs.len() as f64;
        let exact = stationary_failure_rate(p, 2);
        assert!((mean - exact).abs() < 0.01, "p={p}: {mean} vs {exact}");
    }
}
