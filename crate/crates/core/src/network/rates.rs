use serde::{Deserialize, Serialize};

use super::betweenness::{sum_over_sources, SourceDag};
use super::graph::{ChannelId, Direction, NodeId, PaymentGraph};
use crate::error::{Error, Result};
use crate::lifespan;

/// Relative tolerance for "both directions carry the same rate".
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Dense matrix of payment rates between ordered node pairs, in payments per
/// day. The diagonal is always zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatesMatrix {
    n: usize,
    rates: Vec<f64>,
}

impl RatesMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            rates: vec![0.0; n * n],
        }
    }

    /// Every ordered pair sends at `rate`.
    pub fn uniform(n: usize, rate: f64) -> Result<Self> {
        let mut m = Self::zeros(n);
        for s in 0..n {
            for t in 0..n {
                if s != t {
                    m.set(s, t, rate)?;
                }
            }
        }
        Ok(m)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: NodeId, t: NodeId) -> f64 {
        self.rates[s * self.n + t]
    }

    pub fn set(&mut self, s: NodeId, t: NodeId, rate: f64) -> Result<()> {
        if s >= self.n || t >= self.n {
            return Err(Error::NodeNotFound(s.max(t)));
        }
        if s == t {
            return Err(Error::invalid("rate", "diagonal entries are fixed at zero"));
        }
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::invalid("rate", format!("{rate} is not a non-negative rate")));
        }
        self.rates[s * self.n + t] = rate;
        Ok(())
    }

    pub fn row(&self, s: NodeId) -> &[f64] {
        &self.rates[s * self.n..(s + 1) * self.n]
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::invalid("factor", format!("{factor}")));
        }
        Ok(Self {
            n: self.n,
            rates: self.rates.iter().map(|r| r * factor).collect(),
        })
    }

    /// Non-zero entries as `(s, t, rate)` in row-major order.
    pub fn active_pairs(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.rates
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > 0.0)
            .map(move |(i, &r)| (i / self.n, i % self.n, r))
    }

    pub fn total_rate(&self) -> f64 {
        self.rates.iter().sum()
    }

    /// The first asymmetric pair, if any.
    pub fn check_symmetric(&self) -> Result<()> {
        for s in 0..self.n {
            for t in s + 1..self.n {
                let (st, ts) = (self.get(s, t), self.get(t, s));
                if st != ts {
                    return Err(Error::AsymmetricRates { s, t, st, ts });
                }
            }
        }
        Ok(())
    }
}

fn check_dimensions(graph: &PaymentGraph, rates: &RatesMatrix) -> Result<()> {
    if graph.node_count() != rates.node_count() {
        return Err(Error::invalid(
            "rates",
            format!(
                "matrix is {0}x{0} but the graph has {1} nodes",
                rates.node_count(),
                graph.node_count()
            ),
        ));
    }
    Ok(())
}

/// Payment rate carried by every directed edge:
/// `λ(e) = Σ_{s≠t} σ(s,t|e)/σ(s,t) · MRates[s][t]`, indexed by edge id.
pub fn edge_payment_rates(graph: &PaymentGraph, rates: &RatesMatrix) -> Result<Vec<f64>> {
    check_dimensions(graph, rates)?;
    let digraph = graph.digraph();
    Ok(sum_over_sources(digraph, |s, acc| {
        let row = rates.row(s);
        if row.iter().all(|&r| r == 0.0) {
            return;
        }
        SourceDag::build(digraph, s).accumulate(|t| row[t], acc);
    }))
}

/// Payment rate over the single edge `from -> to`.
pub fn edge_payment_rate(
    graph: &PaymentGraph,
    rates: &RatesMatrix,
    from: NodeId,
    to: NodeId,
) -> Result<f64> {
    let edge = graph
        .edge_id(from, to)
        .ok_or(Error::EdgeNotFound { from, to })?;
    Ok(edge_payment_rates(graph, rates)?[edge])
}

/// Both directional rates of a channel, `(λ(a,b), λ(b,a))`.
pub fn channel_rates(edge_rates: &[f64], channel: ChannelId) -> (f64, f64) {
    (
        edge_rates[PaymentGraph::edge_of_channel(channel, Direction::AToB)],
        edge_rates[PaymentGraph::edge_of_channel(channel, Direction::BToA)],
    )
}

/// Probability that the next payment over `channel` flows from its A side to
/// its B side.
pub fn channel_direction_probability(
    graph: &PaymentGraph,
    rates: &RatesMatrix,
    channel: ChannelId,
) -> Result<f64> {
    if channel >= graph.channel_count() {
        return Err(Error::invalid("channel", format!("no channel {channel}")));
    }
    let edge_rates = edge_payment_rates(graph, rates)?;
    let (ab, ba) = channel_rates(&edge_rates, channel);
    lifespan::direction_probability(ab, ba)
}

/// Direction probability of every channel; dead channels yield an error entry.
pub fn direction_probabilities(
    graph: &PaymentGraph,
    rates: &RatesMatrix,
) -> Result<Vec<Result<f64>>> {
    let edge_rates = edge_payment_rates(graph, rates)?;
    Ok((0..graph.channel_count())
        .map(|c| {
            let (ab, ba) = channel_rates(&edge_rates, c);
            lifespan::direction_probability(ab, ba)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryReport {
    /// Largest `|λ(a,b) - λ(b,a)| / max(λ(a,b), λ(b,a))` over live channels.
    pub max_deviation: f64,
    pub worst_channel: Option<ChannelId>,
    pub dead_channels: usize,
}

/// Checks that symmetric rates give every channel equal directional rates,
/// and hence `p = 1/2`.
pub fn verify_symmetric_rates(graph: &PaymentGraph, rates: &RatesMatrix) -> Result<SymmetryReport> {
    rates.check_symmetric()?;
    let edge_rates = edge_payment_rates(graph, rates)?;
    let mut report = SymmetryReport {
        max_deviation: 0.0,
        worst_channel: None,
        dead_channels: 0,
    };
    for channel in 0..graph.channel_count() {
        let (ab, ba) = channel_rates(&edge_rates, channel);
        let scale = ab.max(ba);
        if scale == 0.0 {
            report.dead_channels += 1;
            continue;
        }
        let deviation = (ab - ba).abs() / scale;
        if report.worst_channel.is_none() || deviation > report.max_deviation {
            report.max_deviation = deviation;
            report.worst_channel = Some(channel);
        }
        if deviation >= SYMMETRY_TOLERANCE {
            return Err(Error::RateSymmetryViolated { channel, deviation });
        }
    }
    Ok(report)
}
