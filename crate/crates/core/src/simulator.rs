//! Discrete-event payment routing over a fixed channel graph.
//!
//! Payments are replayed in time order. Each one follows a hop-count
//! shortest path chosen uniformly among all shortest paths; it succeeds only
//! if every hop can forward one payment size, in which case all hops move
//! atomically. There is no retry on another path.

use std::io::Write;
use std::sync::OnceLock;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{
    undirected_channel_betweenness, ChannelId, Direction, EdgeId, NodeId, PaymentGraph, SourceDag,
};
use crate::rng::{self, SimRng};
use crate::traffic::PaymentEvent;

/// Default cap for explicit shortest-path enumeration.
pub const DEFAULT_MAX_PATHS: usize = 10_000;

/// Lazily built shortest-path DAGs, one per source, shareable across threads.
#[derive(Debug)]
pub struct ShortestPathIndex<'g> {
    graph: &'g PaymentGraph,
    dags: Vec<OnceLock<SourceDag>>,
}

impl<'g> ShortestPathIndex<'g> {
    pub fn new(graph: &'g PaymentGraph) -> Self {
        Self {
            graph,
            dags: (0..graph.node_count()).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn graph(&self) -> &'g PaymentGraph {
        self.graph
    }

    pub fn dag(&self, source: NodeId) -> &SourceDag {
        self.dags[source].get_or_init(|| SourceDag::build(self.graph.digraph(), source))
    }

    /// Number of shortest paths from `source` to `target` (0 if unreachable).
    pub fn path_count(&self, source: NodeId, target: NodeId) -> f64 {
        self.dag(source).sigma[target]
    }

    /// A shortest path drawn uniformly at random, as edge ids from source to
    /// target. Walking back from the target, predecessor `v` of `w` is picked
    /// with probability `σ(v)/σ(w)`, which makes every path equally likely.
    pub fn sample_path(&self, source: NodeId, target: NodeId, rng: &mut SimRng) -> Option<Vec<EdgeId>> {
        let dag = self.dag(source);
        if source == target || !dag.reaches(target) {
            return None;
        }
        let mut path = Vec::with_capacity(dag.dist[target] as usize);
        let mut node = target;
        while node != source {
            let preds = &dag.preds[node];
            let mut pick = rng.random::<f64>() * dag.sigma[node];
            let mut chosen = preds[preds.len() - 1];
            for &(v, edge) in preds {
                pick -= dag.sigma[v];
                if pick < 0.0 {
                    chosen = (v, edge);
                    break;
                }
            }
            path.push(chosen.1);
            node = chosen.0;
        }
        path.reverse();
        Some(path)
    }

    /// Every shortest path from `source` to `target`, up to `limit` paths.
    pub fn enumerate_paths(&self, source: NodeId, target: NodeId, limit: usize) -> Vec<Vec<EdgeId>> {
        let dag = self.dag(source);
        let mut out = Vec::new();
        if source == target || !dag.reaches(target) {
            return out;
        }
        let mut suffix = Vec::new();
        enumerate_back(dag, source, target, &mut suffix, &mut out, limit);
        out
    }
}

fn enumerate_back(
    dag: &SourceDag,
    source: NodeId,
    node: NodeId,
    suffix: &mut Vec<EdgeId>,
    out: &mut Vec<Vec<EdgeId>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if node == source {
        out.push(suffix.iter().rev().copied().collect());
        return;
    }
    for &(v, edge) in &dag.preds[node] {
        suffix.push(edge);
        enumerate_back(dag, source, v, suffix, out, limit);
        suffix.pop();
    }
}

/// Live state of one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelState {
    pub balance_a: u64,
    pub balance_b: u64,
    pub capacity: u64,
    /// Time of the first moment a side could not forward one payment.
    pub first_unbalance_time: Option<f64>,
    /// Payments that had moved across the channel when it first unbalanced.
    pub first_unbalance_step: Option<u64>,
    /// Payments whose chosen path included this channel.
    pub attempts: u64,
    /// Payments that moved across this channel.
    pub successes: u64,
}

impl ChannelState {
    pub fn new(balance_a: u64, balance_b: u64) -> Self {
        Self {
            balance_a,
            balance_b,
            capacity: balance_a + balance_b,
            first_unbalance_time: None,
            first_unbalance_step: None,
            attempts: 0,
            successes: 0,
        }
    }

    pub fn is_unbalanced(&self, omega: u64) -> bool {
        self.balance_a.min(self.balance_b) < omega
    }

    fn can_send(&self, direction: Direction, omega: u64) -> bool {
        match direction {
            Direction::AToB => self.balance_a >= omega,
            Direction::BToA => self.balance_b >= omega,
        }
    }

    fn shift(&mut self, direction: Direction, omega: u64) {
        match direction {
            Direction::AToB => {
                self.balance_a -= omega;
                self.balance_b += omega;
            }
            Direction::BToA => {
                self.balance_b -= omega;
                self.balance_a += omega;
            }
        }
    }

    fn mark_if_unbalanced(&mut self, omega: u64, time: f64) {
        if self.first_unbalance_time.is_none() && self.is_unbalanced(omega) {
            self.first_unbalance_time = Some(time);
            self.first_unbalance_step = Some(self.successes);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteOutcome {
    pub success: bool,
    /// Edges of the sampled path; empty when the destination is unreachable.
    pub path: Vec<EdgeId>,
}

/// Routes one payment, mutating balances only on success.
pub fn route_payment(
    index: &ShortestPathIndex<'_>,
    states: &mut [ChannelState],
    event: &PaymentEvent,
    rng: &mut SimRng,
) -> Result<RouteOutcome> {
    let n = index.graph().node_count();
    for node in [event.source, event.destination] {
        if node >= n {
            return Err(Error::NodeNotFound(node));
        }
    }
    let Some(path) = index.sample_path(event.source, event.destination, rng) else {
        return Ok(RouteOutcome {
            success: false,
            path: Vec::new(),
        });
    };
    let omega = event.amount;
    let mut feasible = true;
    for &edge in &path {
        let (channel, direction) = PaymentGraph::channel_of_edge(edge);
        let state = &mut states[channel];
        state.attempts += 1;
        feasible &= state.can_send(direction, omega);
    }
    if feasible {
        for &edge in &path {
            let (channel, direction) = PaymentGraph::channel_of_edge(edge);
            let state = &mut states[channel];
            state.shift(direction, omega);
            state.successes += 1;
            state.mark_if_unbalanced(omega, event.time);
        }
    }
    Ok(RouteOutcome {
        success: feasible,
        path,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub channels: Vec<ChannelState>,
    pub network_attempts: u64,
    pub network_successes: u64,
    pub success_rate: Option<f64>,
}

/// Stateful simulation of one run.
pub struct Simulation<'a, 'g> {
    index: &'a ShortestPathIndex<'g>,
    states: Vec<ChannelState>,
    omega: u64,
    rng: SimRng,
    attempts: u64,
    successes: u64,
}

impl<'a, 'g> Simulation<'a, 'g> {
    /// Starts from the graph's funds. Channels that already cannot forward a
    /// payment count as unbalanced at time 0.
    pub fn new(index: &'a ShortestPathIndex<'g>, omega: u64, seed: u64) -> Result<Self> {
        let states = index
            .graph()
            .channels()
            .iter()
            .map(|c| ChannelState::new(c.fund_a, c.fund_b))
            .collect();
        Self::with_states(index, states, omega, seed)
    }

    pub fn with_states(
        index: &'a ShortestPathIndex<'g>,
        mut states: Vec<ChannelState>,
        omega: u64,
        seed: u64,
    ) -> Result<Self> {
        if omega == 0 {
            return Err(Error::invalid("omega", "payment size must be positive"));
        }
        if states.len() != index.graph().channel_count() {
            return Err(Error::invalid("states", "one state per channel is required"));
        }
        for state in &mut states {
            state.mark_if_unbalanced(omega, 0.0);
        }
        Ok(Self {
            index,
            states,
            omega,
            rng: rng::stream(seed, 0),
            attempts: 0,
            successes: 0,
        })
    }

    pub fn states(&self) -> &[ChannelState] {
        &self.states
    }

    pub fn route(&mut self, event: &PaymentEvent) -> Result<RouteOutcome> {
        if event.amount != self.omega {
            return Err(Error::invalid(
                "amount",
                format!("event pays {} sat but the run uses {}", event.amount, self.omega),
            ));
        }
        let outcome = route_payment(self.index, &mut self.states, event, &mut self.rng)?;
        self.attempts += 1;
        self.successes += outcome.success as u64;
        Ok(outcome)
    }

    pub fn all_unbalanced(&self) -> bool {
        self.states.iter().all(|s| s.first_unbalance_time.is_some())
    }

    pub fn finish(self) -> SimResult {
        SimResult {
            success_rate: (self.attempts > 0).then(|| self.successes as f64 / self.attempts as f64),
            channels: self.states,
            network_attempts: self.attempts,
            network_successes: self.successes,
        }
    }
}

/// Replays `events` (which must be time-sorted and all of size `omega`).
pub fn run_simulation(
    graph: &PaymentGraph,
    events: &[PaymentEvent],
    omega: u64,
    seed: u64,
) -> Result<SimResult> {
    let index = ShortestPathIndex::new(graph);
    run_simulation_with(&index, events, omega, seed)
}

pub fn run_simulation_with(
    index: &ShortestPathIndex<'_>,
    events: &[PaymentEvent],
    omega: u64,
    seed: u64,
) -> Result<SimResult> {
    if events.windows(2).any(|w| w[0].time > w[1].time) {
        return Err(Error::invalid("events", "stream is not sorted by time"));
    }
    let mut sim = Simulation::new(index, omega, seed)?;
    for event in events {
        sim.route(event)?;
    }
    Ok(sim.finish())
}

#[derive(Serialize)]
struct ChannelRow<'a> {
    channel_id: ChannelId,
    node_a: &'a str,
    node_b: &'a str,
    capacity_sat: u64,
    balance_a_sat: u64,
    balance_b_sat: u64,
    first_unbalance_step_payments: Option<u64>,
    first_unbalance_time_days: Option<f64>,
    attempts_payments: u64,
    successes_payments: u64,
}

/// Per-channel result table as CSV.
pub fn write_channel_results<W: Write>(graph: &PaymentGraph, result: &SimResult, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for (id, (channel, state)) in graph.channels().iter().zip(&result.channels).enumerate() {
        writer.serialize(ChannelRow {
            channel_id: id,
            node_a: graph.label(channel.node_a),
            node_b: graph.label(channel.node_b),
            capacity_sat: state.capacity,
            balance_a_sat: state.balance_a,
            balance_b_sat: state.balance_b,
            first_unbalance_step_payments: state.first_unbalance_step,
            first_unbalance_time_days: state.first_unbalance_time,
            attempts_payments: state.attempts,
            successes_payments: state.successes,
        })?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub channels: usize,
    pub unbalanced_channels: usize,
    pub network_attempts: u64,
    pub network_successes: u64,
    pub success_rate: Option<f64>,
}

impl SimResult {
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            channels: self.channels.len(),
            unbalanced_channels: self
                .channels
                .iter()
                .filter(|c| c.first_unbalance_time.is_some())
                .count(),
            network_attempts: self.network_attempts,
            network_successes: self.network_successes,
            success_rate: self.success_rate,
        }
    }
}

/// Post-imbalance behaviour of a lone channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleChannelOutcome {
    /// 1-based index of the payment that first unbalanced the channel.
    pub first_unbalance_payment: u64,
    pub attempts_after: u64,
    pub failures_after: u64,
    pub failure_rate: f64,
}

/// Sends `n_payments` payments of size `omega` through an initially
/// balanced channel, each from A to B with probability `p`, and measures the
/// failure rate of the payments after the first imbalance.
pub fn single_channel_experiment(
    p: f64,
    capacity: u64,
    omega: u64,
    n_payments: u64,
    seed: u64,
) -> Result<SingleChannelOutcome> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", format!("{p} is not in (0, 1)")));
    }
    if omega == 0 {
        return Err(Error::invalid("omega", "payment size must be positive"));
    }
    let mut state = ChannelState::new(capacity / 2, capacity - capacity / 2);
    if state.is_unbalanced(omega) {
        return Err(Error::DegenerateChannel {
            fund_a: state.balance_a,
            fund_b: state.balance_b,
            payment_size: omega,
        });
    }
    let mut rng = rng::stream(seed, 0);
    let mut first = None;
    let mut attempts_after = 0;
    let mut failures_after = 0;
    for i in 1..=n_payments {
        let direction = if rng.random_bool(p) {
            Direction::AToB
        } else {
            Direction::BToA
        };
        let ok = state.can_send(direction, omega);
        if ok {
            state.shift(direction, omega);
        }
        if first.is_some() {
            attempts_after += 1;
            failures_after += (!ok) as u64;
        } else if state.is_unbalanced(omega) {
            first = Some(i);
        }
    }
    match first {
        Some(at) if attempts_after > 0 => Ok(SingleChannelOutcome {
            first_unbalance_payment: at,
            attempts_after,
            failures_after,
            failure_rate: failures_after as f64 / attempts_after as f64,
        }),
        _ => Err(Error::NoUnbalanceObserved {
            payments: n_payments,
        }),
    }
}

/// Which channels to force one-sided.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Selection {
    Random { fraction: f64 },
    TopBetweenness { fraction: f64 },
    /// Channels ranked `start_rank..start_rank + width` by betweenness,
    /// most central first.
    Window { start_rank: usize, width: usize },
}

/// Precomputed state shared by repeated forced-imbalance runs on one graph.
pub struct UnbalanceBench<'g> {
    index: ShortestPathIndex<'g>,
    /// Channel ids, most central first; ties keep channel order.
    ranking: Vec<ChannelId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnbalanceOutcome {
    pub forced: Vec<ChannelId>,
    pub attempts: u64,
    pub successes: u64,
    pub success_rate: f64,
}

impl<'g> UnbalanceBench<'g> {
    pub fn new(graph: &'g PaymentGraph) -> Self {
        let ebc = undirected_channel_betweenness(graph);
        let mut ranking: Vec<ChannelId> = (0..graph.channel_count()).collect();
        ranking.sort_by(|&x, &y| ebc[y].total_cmp(&ebc[x]).then(x.cmp(&y)));
        Self {
            index: ShortestPathIndex::new(graph),
            ranking,
        }
    }

    pub fn ranking(&self) -> &[ChannelId] {
        &self.ranking
    }

    pub fn select(&self, selection: Selection, rng: &mut SimRng) -> Result<Vec<ChannelId>> {
        let total = self.ranking.len();
        let count_of = |fraction: f64| -> Result<usize> {
            if !(0.0..=1.0).contains(&fraction) {
                return Err(Error::invalid("fraction", format!("{fraction} is not in [0, 1]")));
            }
            Ok((fraction * total as f64).round() as usize)
        };
        match selection {
            Selection::Random { fraction } => {
                let k = count_of(fraction)?;
                let mut picked = index::sample(rng, total, k).into_vec();
                picked.sort_unstable();
                Ok(picked)
            }
            Selection::TopBetweenness { fraction } => {
                let k = count_of(fraction)?;
                Ok(self.ranking[..k].to_vec())
            }
            Selection::Window { start_rank, width } => {
                if start_rank + width > total {
                    return Err(Error::invalid(
                        "window",
                        format!("{start_rank}+{width} exceeds {total} channels"),
                    ));
                }
                Ok(self.ranking[start_rank..start_rank + width].to_vec())
            }
        }
    }

    /// Forces the selected channels one-sided (side drawn per channel), then
    /// routes `n_payments` payments between uniformly random distinct nodes.
    pub fn run(
        &self,
        selection: Selection,
        n_payments: u64,
        omega: u64,
        seed: u64,
    ) -> Result<UnbalanceOutcome> {
        let graph = self.index.graph();
        let n = graph.node_count();
        if n < 2 {
            return Err(Error::EmptyGraph);
        }
        let mut rng = rng::stream(seed, 1);
        let forced = self.select(selection, &mut rng)?;
        let mut states: Vec<ChannelState> = graph
            .channels()
            .iter()
            .map(|c| ChannelState::new(c.fund_a, c.fund_b))
            .collect();
        for &c in &forced {
            let capacity = states[c].capacity;
            states[c] = if rng.random_bool(0.5) {
                ChannelState::new(capacity, 0)
            } else {
                ChannelState::new(0, capacity)
            };
        }
        let mut sim = Simulation::with_states(&self.index, states, omega, seed)?;
        for i in 0..n_payments {
            let source = rng.random_range(0..n);
            let mut destination = rng.random_range(0..n - 1);
            if destination >= source {
                destination += 1;
            }
            sim.route(&PaymentEvent {
                time: i as f64,
                source,
                destination,
                amount: omega,
            })?;
        }
        let result = sim.finish();
        Ok(UnbalanceOutcome {
            forced,
            attempts: result.network_attempts,
            successes: result.network_successes,
            success_rate: result.success_rate.unwrap_or(0.0),
        })
    }
}

/// One-shot form of [`UnbalanceBench::run`].
pub fn unbalance_experiment(
    graph: &PaymentGraph,
    selection: Selection,
    n_payments: u64,
    omega: u64,
    seed: u64,
) -> Result<UnbalanceOutcome> {
    UnbalanceBench::new(graph).run(selection, n_payments, omega, seed)
}
