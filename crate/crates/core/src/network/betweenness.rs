//! Hop-count shortest paths and edge betweenness.
//!
//! Single-source BFS builds the shortest-path DAG with path counts `σ`;
//! walking it back from the farthest node accumulates, for every edge
//! `(v, w)`, the share `σ(s,v)/σ(s,w)` of each target's pair weight. Summed
//! over sources this yields `Σ_{s≠t} σ(s,t|e)/σ(s,t) · weight(s,t)`, which is
//! edge betweenness for unit weights and an edge's payment rate when the
//! weights are a rates matrix.

use rayon::prelude::*;

use super::graph::{ChannelId, DiGraph, EdgeId, NodeId, PaymentGraph};

pub const UNREACHABLE: u32 = u32::MAX;

/// Shortest-path DAG rooted at one source.
#[derive(Debug, Clone)]
pub struct SourceDag {
    pub source: NodeId,
    pub dist: Vec<u32>,
    /// Number of shortest paths from the source; 0 when unreachable.
    pub sigma: Vec<f64>,
    /// Reachable nodes in non-decreasing distance.
    pub order: Vec<NodeId>,
    /// For each node, `(predecessor, edge)` pairs on some shortest path.
    pub preds: Vec<Vec<(NodeId, EdgeId)>>,
}

impl SourceDag {
    pub fn build(graph: &DiGraph, source: NodeId) -> Self {
        let n = graph.node_count();
        let mut dist = vec![UNREACHABLE; n];
        let mut sigma = vec![0.0; n];
        let mut preds = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        dist[source] = 0;
        sigma[source] = 1.0;
        order.push(source);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let next = dist[v] + 1;
            for &(w, edge) in graph.out_edges(v) {
                if dist[w] == UNREACHABLE {
                    dist[w] = next;
                    order.push(w);
                }
                if dist[w] == next {
                    sigma[w] += sigma[v];
                    preds[w].push((v, edge));
                }
            }
        }
        Self {
            source,
            dist,
            sigma,
            order,
            preds,
        }
    }

    pub fn reaches(&self, target: NodeId) -> bool {
        self.dist[target] != UNREACHABLE
    }

    /// Adds this source's contribution to `acc[edge]`, weighting each target
    /// `t` by `weight(t)`.
    pub fn accumulate<W: Fn(NodeId) -> f64>(&self, weight: W, acc: &mut [f64]) {
        let mut delta = vec![0.0; self.dist.len()];
        for &w in self.order.iter().rev() {
            if w == self.source {
                continue;
            }
            let carried = weight(w) + delta[w];
            if carried == 0.0 {
                continue;
            }
            let sigma_w = self.sigma[w];
            for &(v, edge) in &self.preds[w] {
                let share = self.sigma[v] / sigma_w * carried;
                acc[edge] += share;
                delta[v] += share;
            }
        }
    }
}

/// Runs `f(source, acc)` for every source and sums the per-edge results.
///
/// Sources are split into a node-count-determined number of chunks whose
/// partial sums are added in chunk order, so the floating-point result does
/// not depend on scheduling.
pub(crate) fn sum_over_sources<F>(graph: &DiGraph, f: F) -> Vec<f64>
where
    F: Fn(NodeId, &mut [f64]) + Sync,
{
    let n = graph.node_count();
    let m = graph.edge_count();
    if n == 0 {
        return vec![0.0; m];
    }
    let chunk = n.div_ceil(64).max(8);
    let sources: Vec<NodeId> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(chunk)
        .map(|chunk| {
            let mut acc = vec![0.0; m];
            for &s in chunk {
                f(s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; m];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// Directed edge betweenness over all ordered pairs `s != t`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeBetweenness {
    values: Vec<f64>,
}

impl EdgeBetweenness {
    pub fn of(&self, edge: EdgeId) -> f64 {
        self.values[edge]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

pub fn edge_betweenness(graph: &DiGraph) -> EdgeBetweenness {
    let values = sum_over_sources(graph, |s, acc| {
        SourceDag::build(graph, s).accumulate(|_| 1.0, acc);
    });
    EdgeBetweenness { values }
}

/// Betweenness of each channel in the undirected graph, counting every
/// unordered pair `{s, t}` once.
///
/// Computed on undirected adjacency rebuilt from the channel list; on a
/// bidirectional graph it equals the directed betweenness of either of the
/// channel's edges.
pub fn undirected_channel_betweenness(graph: &PaymentGraph) -> Vec<f64> {
    let n = graph.node_count();
    let mut adjacency: Vec<Vec<(NodeId, ChannelId)>> = vec![Vec::new(); n];
    for (id, c) in graph.channels().iter().enumerate() {
        adjacency[c.node_a].push((c.node_b, id));
        adjacency[c.node_b].push((c.node_a, id));
    }
    let sources: Vec<NodeId> = (0..n).collect();
    let m = graph.channel_count();
    let chunk = n.div_ceil(64).max(8);
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(chunk.max(1))
        .map(|chunk| {
            let mut acc = vec![0.0; m];
            for &s in chunk {
                undirected_source(&adjacency, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; m];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    // each unordered pair was visited from both ends
    total.iter_mut().for_each(|v| *v /= 2.0);
    total
}

fn undirected_source(adjacency: &[Vec<(NodeId, ChannelId)>], s: NodeId, acc: &mut [f64]) {
    let n = adjacency.len();
    let mut dist = vec![UNREACHABLE; n];
    let mut sigma = vec![0.0f64; n];
    let mut stack = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();
    dist[s] = 0;
    sigma[s] = 1.0;
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        stack.push(v);
        for &(w, _) in &adjacency[v] {
            if dist[w] == UNREACHABLE {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    while let Some(w) = stack.pop() {
        for &(v, channel) in &adjacency[w] {
            if dist[v] != UNREACHABLE && dist[v] + 1 == dist[w] {
                let c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                acc[channel] += c;
                delta[v] += c;
            }
        }
    }
}
