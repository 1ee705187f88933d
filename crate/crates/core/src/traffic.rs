//! Synthetic workloads: random channel graphs, rates matrices and Poisson
//! payment streams.

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{NodeId, PaymentGraph, RatesMatrix};
use crate::rng;

/// Reference payment size, in satoshi.
pub const DEFAULT_PAYMENT_SIZE: u64 = 60_000;
/// Reference channel capacity, in satoshi.
pub const DEFAULT_CAPACITY: u64 = 2_400_000;

/// How generated channels are funded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FundPolicy {
    /// Both sides get half of `capacity` (the odd satoshi goes to B).
    Balanced { capacity: u64 },
    Fixed { fund_a: u64, fund_b: u64 },
}

impl Default for FundPolicy {
    fn default() -> Self {
        FundPolicy::Balanced {
            capacity: DEFAULT_CAPACITY,
        }
    }
}

impl FundPolicy {
    pub fn funds(&self) -> (u64, u64) {
        match *self {
            FundPolicy::Balanced { capacity } => (capacity / 2, capacity - capacity / 2),
            FundPolicy::Fixed { fund_a, fund_b } => (fund_a, fund_b),
        }
    }
}

/// G(n, p): each unordered pair `i < j` independently becomes a channel
/// with probability `edge_prob`, with `i` as the A side.
pub fn random_network(n: usize, edge_prob: f64, funds: FundPolicy, seed: u64) -> Result<PaymentGraph> {
    if n < 2 {
        return Err(Error::invalid("n", "a network needs at least 2 nodes"));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::invalid("edge_prob", format!("{edge_prob} is not in [0, 1]")));
    }
    let (fund_a, fund_b) = funds.funds();
    let mut rng = rng::stream(seed, 0);
    let mut graph = PaymentGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_prob) {
                graph.add_channel(i, j, fund_a, fund_b)?;
            }
        }
    }
    Ok(graph)
}

/// Knobs of the synthetic rates matrix.
///
/// * `sparse_coefficient` (SC): probability that an unordered pair exchanges
///   no payments at all.
/// * `skew` (SK): ratio between the two directional rates of an active pair;
///   the lower-indexed node sends at `base_rate`, the other at
///   `base_rate / skew`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MRatesConfig {
    pub n: usize,
    pub sparse_coefficient: f64,
    pub skew: f64,
    pub base_rate: f64,
    pub seed: u64,
}

impl MRatesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.sparse_coefficient) {
            return Err(Error::invalid(
                "sparse_coefficient",
                format!("{} is not in [0, 1]", self.sparse_coefficient),
            ));
        }
        if !(self.skew >= 1.0 && self.skew.is_finite()) {
            return Err(Error::invalid("skew", format!("{} is below 1", self.skew)));
        }
        if !(self.base_rate > 0.0 && self.base_rate.is_finite()) {
            return Err(Error::invalid(
                "base_rate",
                format!("{} is not positive", self.base_rate),
            ));
        }
        Ok(())
    }
}

pub fn generate_mrates(config: &MRatesConfig) -> Result<RatesMatrix> {
    config.validate()?;
    let mut rng = rng::stream(config.seed, 1);
    let mut rates = RatesMatrix::zeros(config.n);
    for s in 0..config.n {
        for t in s + 1..config.n {
            if rng.random_bool(config.sparse_coefficient) {
                continue;
            }
            rates.set(s, t, config.base_rate)?;
            rates.set(t, s, config.base_rate / config.skew)?;
        }
    }
    Ok(rates)
}

/// Preferential attachment: nodes `0..=m` start as a clique, then every new
/// node opens channels to `m` distinct earlier nodes picked with probability
/// proportional to their channel count. Gives the hub-heavy degree profile of
/// real channel graphs.
pub fn preferential_attachment(n: usize, m: usize, funds: FundPolicy, seed: u64) -> Result<PaymentGraph> {
    if m == 0 {
        return Err(Error::invalid("m", "each node needs at least one channel"));
    }
    if n <= m {
        return Err(Error::invalid("n", format!("need more than m = {m} nodes")));
    }
    let (fund_a, fund_b) = funds.funds();
    let mut rng = rng::stream(seed, 0);
    let mut graph = PaymentGraph::new(n);
    // every endpoint of every channel, so a uniform pick is degree-weighted
    let mut endpoints: Vec<NodeId> = Vec::new();
    for i in 0..=m {
        for j in i + 1..=m {
            graph.add_channel(i, j, fund_a, fund_b)?;
            endpoints.extend([i, j]);
        }
    }
    for v in m + 1..n {
        let mut targets: Vec<NodeId> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            graph.add_channel(t, v, fund_a, fund_b)?;
            endpoints.extend([t, v]);
        }
    }
    Ok(graph)
}

/// A single payment of `amount` satoshi requested at `time` (days).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaymentEvent {
    #[serde(rename = "time_days")]
    pub time: f64,
    pub source: NodeId,
    pub destination: NodeId,
    #[serde(rename = "amount_sat")]
    pub amount: u64,
}

/// Independent homogeneous Poisson processes on `[0, horizon]` for every
/// pair with a positive rate, merged in time order.
///
/// Each pair draws from its own random stream, so adding or removing a pair
/// leaves the other pairs' arrivals unchanged.
pub fn generate_payment_stream(
    rates: &RatesMatrix,
    horizon: f64,
    omega: u64,
    seed: u64,
) -> Result<Vec<PaymentEvent>> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::invalid("horizon", format!("{horizon} is not positive")));
    }
    if omega == 0 {
        return Err(Error::invalid("omega", "payment size must be positive"));
    }
    let n = rates.node_count() as u64;
    let mut events = Vec::new();
    for (s, t, rate) in rates.active_pairs() {
        let gap = Exp::new(rate).map_err(|e| Error::invalid("rate", e.to_string()))?;
        let mut rng = rng::stream(seed, 2 + s as u64 * n + t as u64);
        let mut time = 0.0;
        loop {
            time += gap.sample(&mut rng);
            if time > horizon {
                break;
            }
            events.push(PaymentEvent {
                time,
                source: s,
                destination: t,
                amount: omega,
            });
        }
    }
    events.sort_by(|x, y| {
        x.time
            .total_cmp(&y.time)
            .then(x.source.cmp(&y.source))
            .then(x.destination.cmp(&y.destination))
    });
    Ok(events)
}

/// Writes events as CSV with header `time_days,source,destination,amount_sat`.
pub fn write_events<W: Write>(events: &[PaymentEvent], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for event in events {
        writer.serialize(event)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads an event log, checking it is time-sorted and free of self-payments.
pub fn read_events<R: Read>(input: R) -> Result<Vec<PaymentEvent>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut events: Vec<PaymentEvent> = Vec::new();
    for row in reader.deserialize::<PaymentEvent>() {
        let event = row?;
        let line = events.len() as u64 + 2;
        let bad = |reason: &str| Error::Malformed {
            path: "<events>".into(),
            line,
            reason: reason.to_string(),
        };
        if event.source == event.destination {
            return Err(bad("source equals destination"));
        }
        if event.time.is_nan() || event.time < 0.0 {
            return Err(bad("negative time"));
        }
        if events.last().is_some_and(|prev| prev.time > event.time) {
            return Err(bad("events are not sorted by time"));
        }
        events.push(event);
    }
    Ok(events)
}
