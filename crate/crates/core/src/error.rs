use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate channel: funds ({fund_a} sat, {fund_b} sat) cannot route a single {payment_size} sat payment in both directions")]
    DegenerateChannel {
        fund_a: u64,
        fund_b: u64,
        payment_size: u64,
    },

    #[error("dead channel: both directional payment rates are zero")]
    DeadChannel,

    #[error("numerical failure evaluating expected steps for p={p}, a={a}, b={b}")]
    NonFinite { p: f64, a: u64, b: u64 },

    #[error("edge ({from}, {to}) is not in the graph")]
    EdgeNotFound { from: usize, to: usize },

    #[error("node {0} is not in the graph")]
    NodeNotFound(usize),

    #[error("rates matrix is not symmetric at ({s}, {t}): {st} vs {ts}")]
    AsymmetricRates { s: usize, t: usize, st: f64, ts: f64 },

    #[error("directional rates differ on channel {channel}: relative deviation {deviation:e}")]
    RateSymmetryViolated { channel: usize, deviation: f64 },

    #[error("no unbalance observed within {payments} payments")]
    NoUnbalanceObserved { payments: u64 },

    #[error("graph has no channels")]
    EmptyGraph,

    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
