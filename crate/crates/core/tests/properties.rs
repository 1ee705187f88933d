mod common;

use chanlife::evaluation::{evaluate_on, EvaluationConfig};
use chanlife::lifespan::{expected_steps, expected_steps_from, WalkParams};
use chanlife::network::{
    edge_betweenness, edge_payment_rates, verify_symmetric_rates, RatesMatrix,
};
use chanlife::rng;
use chanlife::simulator::{route_payment, run_simulation, write_channel_results, ChannelState, ShortestPathIndex};
use chanlife::snapshot::{analyze_snapshot, betweenness_lifespan_batches, betweenness_lifespan_correlation};
use chanlife::traffic::{
    generate_mrates, generate_payment_stream, preferential_attachment, write_events, FundPolicy, MRatesConfig,
    PaymentEvent,
};
use common::random_channels;
use proptest::prelude::*;
use rand::Rng;

fn f(p: f64, a: u64, b: u64) -> f64 {
    expected_steps(&WalkParams::new(p, a, b).unwrap()).unwrap()
}

fn random_rates(n: usize, seed: u64, symmetric: bool) -> RatesMatrix {
    let mut r = rng::stream(seed, 7);
    let mut rates = RatesMatrix::zeros(n);
    for s in 0..n {
        for t in s + 1..n {
            let x = r.random_range(0.0..2.0);
            let y = if symmetric { x } else { r.random_range(0.0..2.0) };
            rates.set(s, t, x).unwrap();
            rates.set(t, s, y).unwrap();
        }
    }
    rates
}

proptest! {
    #[test]
    fn swapping_sides_mirrors_p(p in 0.001f64..0.999, a in 1u64..300, b in 1u64..300) {
        prop_assert_eq!(f(p, a, b), f(1.0 - p, b, a));
    }

    #[test]
    fn balanced_lifespan_grows_with_either_fund(a in 1u64..500, b in 1u64..500) {
        prop_assert!(f(0.5, a + 1, b) > f(0.5, a, b));
        prop_assert!(f(0.5, a, b + 1) > f(0.5, a, b));
    }

    #[test]
    fn equal_funds_peak_at_half(k in 2u64..200, p in 0.01f64..0.99) {
        prop_assume!((p - 0.5).abs() > 1e-6);
        prop_assert!(f(p, k, k) < f(0.5, k, k));
    }

    #[test]
    fn boundaries_absorb_immediately(p in 0.01f64..0.99, a in 1u64..100, b in 1u64..100) {
        let top = WalkParams::new(p, a, b).unwrap().starting_at(a as i64).unwrap();
        let bottom = WalkParams::new(p, a, b).unwrap().starting_at(-(b as i64)).unwrap();
        prop_assert_eq!(expected_steps_from(&top).unwrap(), 0.0);
        prop_assert_eq!(expected_steps_from(&bottom).unwrap(), 0.0);
    }

    #[test]
    fn continuous_across_balanced_seam(a in 1u64..60, b in 1u64..60) {
        let at = f(0.5, a, b);
        for eps in [1e-7, -1e-7] {
            let near = f(0.5 + eps, a, b);
            prop_assert!((near - at).abs() / at < 1e-3, "{} vs {}", near, at);
        }
    }

    #[test]
    fn steps_are_positive_and_finite(p in 0.001f64..0.999, a in 1u64..2000, b in 1u64..2000) {
        let s = f(p, a, b);
        prop_assert!(s.is_finite() && s >= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn uniform_rates_give_scaled_betweenness(seed in 0u64..10_000, n in 3usize..12, r in 0.01f64..5.0) {
        let g = random_channels(n, 0.4, 10, seed);
        let edge = edge_payment_rates(&g, &RatesMatrix::uniform(n, r).unwrap()).unwrap();
        let ebc = edge_betweenness(g.digraph());
        for (e, &x) in edge.iter().enumerate() {
            let y = r * ebc.of(e);
            prop_assert!((x - y).abs() <= 1e-12 * y.max(1.0));
        }
    }

    #[test]
    fn direction_probability_ignores_rate_scale(seed in 0u64..10_000, k in 0.01f64..100.0) {
        let g = random_channels(8, 0.4, 10, seed);
        let rates = random_rates(8, seed, false);
        let base = edge_payment_rates(&g, &rates).unwrap();
        let scaled = edge_payment_rates(&g, &rates.scaled(k).unwrap()).unwrap();
        for c in 0..g.channel_count() {
            let (x, y) = (base[2 * c], base[2 * c + 1]);
            let (sx, sy) = (scaled[2 * c], scaled[2 * c + 1]);
            if x + y > 0.0 {
                prop_assert!((x / (x + y) - sx / (sx + sy)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_rates_balance_every_channel(seed in 0u64..10_000) {
        let g = random_channels(10, 0.35, 10, seed);
        let report = verify_symmetric_rates(&g, &random_rates(10, seed, true)).unwrap();
        prop_assert!(report.max_deviation < 1e-12);
    }

    #[test]
    fn routing_conserves_capacity_and_failures_change_nothing(seed in 0u64..10_000, units in 1u64..4) {
        let g = random_channels(9, 0.4, units * 10, seed);
        let index = ShortestPathIndex::new(&g);
        let mut states: Vec<ChannelState> = g
            .channels()
            .iter()
            .map(|c| ChannelState::new(c.fund_a, c.fund_b))
            .collect();
        let capacities: Vec<u64> = states.iter().map(|s| s.balance_a + s.balance_b).collect();
        let mut r = rng::stream(seed, 1);
        let mut pick = rng::stream(seed, 2);
        for step in 0..400 {
            let s = pick.random_range(0..9);
            let t = pick.random_range(0..9);
            if s == t {
                continue;
            }
            let event = PaymentEvent { time: step as f64, source: s, destination: t, amount: 10 };
            let before: Vec<(u64, u64)> = states.iter().map(|s| (s.balance_a, s.balance_b)).collect();
            let outcome = route_payment(&index, &mut states, &event, &mut r).unwrap();
            let after: Vec<(u64, u64)> = states.iter().map(|s| (s.balance_a, s.balance_b)).collect();
            if !outcome.success {
                prop_assert_eq!(before, after);
            }
            for (st, &cap) in states.iter().zip(&capacities) {
                prop_assert_eq!(st.balance_a + st.balance_b, cap);
            }
        }
    }

    #[test]
    fn payment_stream_is_time_ordered(seed in 0u64..10_000, sc in 0.0f64..0.9, sk in 1.0f64..10.0) {
        let rates = generate_mrates(&MRatesConfig { n: 12, sparse_coefficient: sc, skew: sk, base_rate: 1.0, seed }).unwrap();
        let events = generate_payment_stream(&rates, 5.0, 60_000, seed).unwrap();
        for w in events.windows(2) {
            prop_assert!(w[0].time <= w[1].time);
        }
        for e in &events {
            prop_assert!(e.time > 0.0 && e.time <= 5.0 && e.source != e.destination);
            prop_assert!(rates.get(e.source, e.destination) > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn same_seed_same_bytes(seed in 0u64..10_000) {
        let run = || {
            let g = random_channels(12, 0.3, 120_000, seed);
            let rates = generate_mrates(&MRatesConfig { n: 12, sparse_coefficient: 0.3, skew: 4.0, base_rate: 1.0, seed }).unwrap();
            let events = generate_payment_stream(&rates, 20.0, 60_000, seed).unwrap();
            let result = run_simulation(&g, &events, 60_000, seed).unwrap();
            let mut bytes = Vec::new();
            write_events(&events, &mut bytes).unwrap();
            write_channel_results(&g, &result, &mut bytes).unwrap();
            bytes
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn every_channel_is_either_scored_or_excluded(seed in 0u64..10_000, sc in 0.0f64..0.9, sk in 1.0f64..8.0) {
        let mut cfg = EvaluationConfig::reference(sc, sk, seed);
        cfg.nodes = 14;
        cfg.edge_prob = 0.35;
        cfg.iterations = 3;
        cfg.capacity = 600_000;
        let g = chanlife::traffic::random_network(cfg.nodes, cfg.edge_prob, FundPolicy::Balanced { capacity: cfg.capacity }, seed).unwrap();
        prop_assume!(g.channel_count() > 0);
        let rates = generate_mrates(&cfg.mrates_config()).unwrap();
        let report = evaluate_on(&g, &rates, &cfg).unwrap();
        prop_assert_eq!(report.included_count + report.excluded_count, g.channel_count());
        prop_assert_eq!(report.channels.len(), g.channel_count());
        let scored = report.channels.iter().filter(|c| c.excluded.is_none()).count();
        prop_assert_eq!(scored, report.included_count);
    }

    #[test]
    fn central_channels_live_shorter(seed in 0u64..10_000) {
        let mut g = preferential_attachment(150, 2, FundPolicy::default(), seed).unwrap();
        let mut r = rng::stream(seed, 3);
        for c in 0..g.channel_count() {
            let units = r.random_range(30u64..50);
            g.set_channel_funds(c, units * 30_000, units * 30_000);
        }
        let analysis = analyze_snapshot(&g, 0.0022, 60_000).unwrap();
        prop_assert!(betweenness_lifespan_correlation(&analysis).unwrap() < 0.0);
        prop_assert!(analysis.central.unwrap().median < analysis.all.unwrap().median);
        let one = betweenness_lifespan_batches(&analysis, g.channel_count()).unwrap();
        prop_assert_eq!(one.len(), 1);
        let mean = analysis.all.unwrap().mean;
        prop_assert!((one[0].mean_days - mean).abs() <= 1e-9 * mean);
    }

    #[test]
    fn doubling_capacity_quadruples_lifespan(seed in 0u64..10_000) {
        let g = preferential_attachment(60, 2, FundPolicy::default(), seed).unwrap();
        let mut doubled = g.clone();
        for c in 0..g.channel_count() {
            let ch = g.channel(c);
            doubled.set_channel_funds(c, 2 * ch.fund_a, 2 * ch.fund_b);
        }
        let x = analyze_snapshot(&g, 0.0022, 60_000).unwrap();
        let y = analyze_snapshot(&doubled, 0.0022, 60_000).unwrap();
        for (u, v) in x.channels.iter().zip(&y.channels) {
            prop_assert!((v.expected_days / u.expected_days - 4.0).abs() < 1e-12);
        }
    }
}

#[test]
fn adding_a_pair_keeps_other_arrivals() {
    let mut rates = RatesMatrix::zeros(4);
    rates.set(0, 1, 2.0).unwrap();
    let alone = generate_payment_stream(&rates, 50.0, 1, 9).unwrap();
    rates.set(2, 3, 5.0).unwrap();
    let both = generate_payment_stream(&rates, 50.0, 1, 9).unwrap();
    let kept: Vec<_> = both.iter().filter(|e| e.source == 0).copied().collect();
    assert_eq!(alone, kept);
}
