use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;
pub type ChannelId = usize;

/// Plain directed graph with dense node ids and stable edge ids.
#[derive(Debug, Clone, Default)]
pub struct DiGraph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    out: Vec<Vec<(NodeId, EdgeId)>>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl DiGraph {
    pub fn new(node_count: usize) -> Self {
        Self {
            node_count,
            edges: Vec::new(),
            out: vec![Vec::new(); node_count],
            index: HashMap::new(),
        }
    }

    /// Builds a graph from directed pairs, rejecting self-loops, repeated
    /// pairs and out-of-range nodes.
    pub fn from_edges(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut graph = Self::new(node_count);
        for &(from, to) in edges {
            graph.add_edge(from, to)?;
        }
        Ok(graph)
    }

    pub fn add_edge(&mut self, from: NodeId, to: NodeId) -> Result<EdgeId> {
        if from >= self.node_count {
            return Err(Error::NodeNotFound(from));
        }
        if to >= self.node_count {
            return Err(Error::NodeNotFound(to));
        }
        if from == to {
            return Err(Error::invalid("edge", format!("self-loop on node {from}")));
        }
        if self.index.contains_key(&(from, to)) {
            return Err(Error::invalid(
                "edge",
                format!("duplicate edge ({from}, {to})"),
            ));
        }
        let id = self.edges.len();
        self.edges.push((from, to));
        self.out[from].push((to, id));
        self.index.insert((from, to), id);
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn endpoints(&self, edge: EdgeId) -> (NodeId, NodeId) {
        self.edges[edge]
    }

    pub fn out_edges(&self, node: NodeId) -> &[(NodeId, EdgeId)] {
        &self.out[node]
    }

    pub fn edge_id(&self, from: NodeId, to: NodeId) -> Option<EdgeId> {
        self.index.get(&(from, to)).copied()
    }

    /// True when every edge has its reverse.
    pub fn is_bidirectional(&self) -> bool {
        self.edges
            .iter()
            .all(|&(from, to)| self.index.contains_key(&(to, from)))
    }
}

/// Which way a payment crosses a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    AToB,
    BToA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub node_a: NodeId,
    pub node_b: NodeId,
    pub fund_a: u64,
    pub fund_b: u64,
}

impl Channel {
    pub fn capacity(&self) -> u64 {
        self.fund_a + self.fund_b
    }
}

/// One row of an edge-list file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub node_a: String,
    pub node_b: String,
    pub fund_a_sat: u64,
    pub fund_b_sat: u64,
}

/// A payment network: every channel is a pair of opposite directed edges.
///
/// Channel `i` owns edge `2i` (A to B) and edge `2i + 1` (B to A).
#[derive(Debug, Clone, Default)]
pub struct PaymentGraph {
    labels: Vec<String>,
    graph: DiGraph,
    channels: Vec<Channel>,
}

impl PaymentGraph {
    /// Nodes labelled `0..node_count`.
    pub fn new(node_count: usize) -> Self {
        Self::with_labels((0..node_count).map(|i| i.to_string()).collect())
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        let graph = DiGraph::new(labels.len());
        Self {
            labels,
            graph,
            channels: Vec::new(),
        }
    }

    pub fn add_channel(
        &mut self,
        node_a: NodeId,
        node_b: NodeId,
        fund_a: u64,
        fund_b: u64,
    ) -> Result<ChannelId> {
        if self.graph.edge_id(node_b, node_a).is_some() {
            return Err(Error::invalid(
                "channel",
                format!("duplicate channel between {node_a} and {node_b}"),
            ));
        }
        let forward = self.graph.add_edge(node_a, node_b)?;
        let backward = self.graph.add_edge(node_b, node_a)?;
        debug_assert_eq!((forward, backward), (2 * self.channels.len(), forward + 1));
        self.channels.push(Channel {
            node_a,
            node_b,
            fund_a,
            fund_b,
        });
        Ok(self.channels.len() - 1)
    }

    /// Builds a graph from edge-list records, assigning node ids in order of
    /// first appearance.
    pub fn from_records<'a, I>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a EdgeRecord>,
    {
        let mut ids: HashMap<String, NodeId> = HashMap::new();
        let mut labels = Vec::new();
        let mut pairs = Vec::new();
        for record in records {
            let mut id_of = |name: &str| {
                *ids.entry(name.to_string()).or_insert_with(|| {
                    labels.push(name.to_string());
                    labels.len() - 1
                })
            };
            let a = id_of(&record.node_a);
            let b = id_of(&record.node_b);
            pairs.push((a, b, record.fund_a_sat, record.fund_b_sat));
        }
        let mut graph = Self::with_labels(labels);
        for (a, b, fa, fb) in pairs {
            graph.add_channel(a, b, fa, fb)?;
        }
        Ok(graph)
    }

    /// Reads a CSV edge list with header `node_a,node_b,fund_a_sat,fund_b_sat`.
    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path)?;
        let mut records = Vec::new();
        for row in reader.deserialize::<EdgeRecord>() {
            let record = row.map_err(|e| Error::Malformed {
                path: path.to_path_buf(),
                line: e.position().map_or(0, |p| p.line()),
                reason: e.to_string(),
            })?;
            records.push(record);
        }
        Self::from_records(&records)
    }

    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        for record in self.records() {
            writer.serialize(record)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn records(&self) -> impl Iterator<Item = EdgeRecord> + '_ {
        self.channels.iter().map(|c| EdgeRecord {
            node_a: self.labels[c.node_a].clone(),
            node_b: self.labels[c.node_b].clone(),
            fund_a_sat: c.fund_a,
            fund_b_sat: c.fund_b,
        })
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel(&self, id: ChannelId) -> &Channel {
        &self.channels[id]
    }

    pub fn set_channel_funds(&mut self, id: ChannelId, fund_a: u64, fund_b: u64) {
        let channel = &mut self.channels[id];
        channel.fund_a = fund_a;
        channel.fund_b = fund_b;
    }

    pub fn digraph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn edge_id(&self, from: NodeId, to: NodeId) -> Option<EdgeId> {
        self.graph.edge_id(from, to)
    }

    pub fn channel_of_edge(edge: EdgeId) -> (ChannelId, Direction) {
        let direction = if edge.is_multiple_of(2) {
            Direction::AToB
        } else {
            Direction::BToA
        };
        (edge / 2, direction)
    }

    pub fn edge_of_channel(channel: ChannelId, direction: Direction) -> EdgeId {
        match direction {
            Direction::AToB => 2 * channel,
            Direction::BToA => 2 * channel + 1,
        }
    }

    /// The channel joining `u` and `v`, in either orientation.
    pub fn find_channel(&self, u: NodeId, v: NodeId) -> Option<ChannelId> {
        self.graph.edge_id(u, v).map(|e| e / 2)
    }
}
