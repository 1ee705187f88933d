//! Effective lifespan of payment channels.
//!
//! A channel stays useful until one side can no longer forward a payment.
//! This crate predicts that moment from the channel's funds and its position
//! in the network, and checks the prediction against a routing simulator.
//!
//! * [`lifespan`]: random-walk absorption time of a single channel.
//! * [`network`]: payment graphs, edge betweenness and per-edge payment rates.
//! * [`traffic`]: random networks, rates matrices and Poisson payment streams.
//! * [`simulator`]: shortest-path routing with balance tracking.
//! * [`evaluation`]: predicted vs. simulated lifespans.
//! * [`snapshot`]: lifespan analysis of a real channel-graph snapshot.
//! * [`sweep`]: parameter sweeps of the single-channel model.

pub mod error;
pub mod evaluation;
pub mod lifespan;
pub mod network;
pub mod rng;
pub mod simulator;
pub mod snapshot;
pub mod stats;
pub mod sweep;
pub mod traffic;

pub mod cli;

pub use error::{Error, Result};
