//! Payment graphs, shortest-path betweenness and the topology-driven rate
//! model.

mod betweenness;
mod graph;
mod rates;

pub use betweenness::{
    edge_betweenness, undirected_channel_betweenness, EdgeBetweenness, SourceDag, UNREACHABLE,
};
pub use graph::{
    Channel, ChannelId, DiGraph, Direction, EdgeId, EdgeRecord, NodeId, PaymentGraph,
};
pub use rates::{
    channel_direction_probability, channel_rates, direction_probabilities, edge_payment_rate,
    edge_payment_rates, verify_symmetric_rates, RatesMatrix, SymmetryReport, SYMMETRY_TOLERANCE,
};
