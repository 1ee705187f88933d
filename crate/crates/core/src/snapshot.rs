//! Lifespan analysis of a channel-graph snapshot.
//!
//! Every channel is assumed balanced and every node pair is assumed to pay
//! each other at the same rate `r`. A channel's payment rate is then
//! `2 * EBC * r`, and its expected lifespan is `(C/ω)² / (8 * EBC * r)` days.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{undirected_channel_betweenness, ChannelId, NodeId, PaymentGraph};
use crate::stats::{self, Bin, Summary};

pub const DEFAULT_CENTRAL_FRACTION: f64 = 0.14;
/// Payments per day between any two nodes.
pub const DEFAULT_PAIR_RATE: f64 = 0.0022;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub channel_id: String,
    pub node_a: String,
    pub node_b: String,
    pub capacity_sat: u64,
}

#[derive(Debug, Clone)]
pub struct LoadedSnapshot {
    pub graph: PaymentGraph,
    /// Snapshot id of each channel; merged duplicates keep the first id.
    pub channel_ids: Vec<String>,
    /// Rows folded into an earlier channel between the same two nodes.
    pub merged_rows: usize,
}

/// Reads a snapshot CSV (`channel_id,node_a,node_b,capacity_sat`).
pub fn load_snapshot(path: impl AsRef<Path>) -> Result<PaymentGraph> {
    Ok(read_snapshot_file(path)?.graph)
}

pub fn read_snapshot_file(path: impl AsRef<Path>) -> Result<LoadedSnapshot> {
    let path = path.as_ref();
    read_snapshot(std::fs::File::open(path)?, path)
}

/// `origin` only labels error messages.
pub fn read_snapshot<R: Read>(input: R, origin: &Path) -> Result<LoadedSnapshot> {
    let malformed = |line: u64, reason: String| Error::Malformed {
        path: origin.to_path_buf(),
        line,
        reason,
    };
    let mut reader = csv::Reader::from_reader(input);
    let mut labels: Vec<String> = Vec::new();
    let mut node_ids: HashMap<String, NodeId> = HashMap::new();
    let mut channels: Vec<(NodeId, NodeId, u64)> = Vec::new();
    let mut channel_ids = Vec::new();
    let mut by_pair: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    let mut merged_rows = 0;
    let headers = reader.headers()?.clone();
    for row in reader.records() {
        let row = row.map_err(|e| malformed(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let record: SnapshotRecord = row
            .deserialize(Some(&headers))
            .map_err(|e| malformed(line, e.to_string()))?;
        if record.capacity_sat == 0 {
            return Err(malformed(line, format!("channel {} has zero capacity", record.channel_id)));
        }
        if record.node_a == record.node_b {
            return Err(malformed(line, format!("channel {} is a self-loop", record.channel_id)));
        }
        let mut id_of = |name: &str| {
            *node_ids.entry(name.to_string()).or_insert_with(|| {
                labels.push(name.to_string());
                labels.len() - 1
            })
        };
        let a = id_of(&record.node_a);
        let b = id_of(&record.node_b);
        let key = (a.min(b), a.max(b));
        if let Some(&existing) = by_pair.get(&key) {
            log::warn!(
                "{}:{line}: channel {} duplicates {} between {} and {}; capacities summed",
                origin.display(),
                record.channel_id,
                channel_ids[existing],
                record.node_a,
                record.node_b
            );
            channels[existing].2 += record.capacity_sat;
            merged_rows += 1;
            continue;
        }
        by_pair.insert(key, channels.len());
        channels.push((a, b, record.capacity_sat));
        channel_ids.push(record.channel_id);
    }
    if channels.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut graph = PaymentGraph::with_labels(labels);
    for (a, b, capacity) in channels {
        graph.add_channel(a, b, capacity / 2, capacity - capacity / 2)?;
    }
    Ok(LoadedSnapshot {
        graph,
        channel_ids,
        merged_rows,
    })
}

pub fn write_snapshot<W: Write>(graph: &PaymentGraph, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for (id, c) in graph.channels().iter().enumerate() {
        writer.serialize(SnapshotRecord {
            channel_id: id.to_string(),
            node_a: graph.label(c.node_a).to_string(),
            node_b: graph.label(c.node_b).to_string(),
            capacity_sat: c.capacity(),
        })?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelLifespan {
    pub channel: ChannelId,
    pub capacity: u64,
    /// Unordered node pairs whose shortest paths cross the channel, each
    /// weighted by the share of their shortest paths that do.
    pub ebc: f64,
    pub expected_payments: f64,
    /// Infinite when no shortest path crosses the channel.
    pub expected_days: f64,
    pub central: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotAnalysis {
    pub r: f64,
    pub omega: u64,
    pub central_fraction: f64,
    pub channels: Vec<ChannelLifespan>,
    /// Lifespan statistics (days) over channels with a finite lifespan.
    pub all: Option<Summary>,
    /// Same, restricted to the most central channels.
    pub central: Option<Summary>,
    pub infinite_count: usize,
    pub central_count: usize,
}

/// `(C/ω)² / 4` payments, or equivalently `(C/2ω)²`.
pub fn balanced_expected_payments(capacity: u64, omega: u64) -> f64 {
    let ratio = capacity as f64 / omega as f64;
    ratio * ratio / 4.0
}

/// `(C/ω)² / (8 * EBC * r)` days; infinite when `ebc` is zero.
pub fn balanced_expected_days(capacity: u64, omega: u64, ebc: f64, r: f64) -> f64 {
    if ebc == 0.0 {
        return f64::INFINITY;
    }
    let ratio = capacity as f64 / omega as f64;
    ratio * ratio / (8.0 * ebc * r)
}

pub fn analyze_snapshot(graph: &PaymentGraph, r: f64, omega: u64) -> Result<SnapshotAnalysis> {
    analyze_snapshot_with(graph, r, omega, DEFAULT_CENTRAL_FRACTION)
}

pub fn analyze_snapshot_with(
    graph: &PaymentGraph,
    r: f64,
    omega: u64,
    central_fraction: f64,
) -> Result<SnapshotAnalysis> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid("r", format!("{r} is not a positive rate")));
    }
    if omega == 0 {
        return Err(Error::invalid("omega", "payment size must be positive"));
    }
    if !(central_fraction > 0.0 && central_fraction <= 1.0) {
        return Err(Error::invalid(
            "central_fraction",
            format!("{central_fraction} is not in (0, 1]"),
        ));
    }
    if graph.channel_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let ebc = undirected_channel_betweenness(graph);
    let mut channels: Vec<ChannelLifespan> = graph
        .channels()
        .iter()
        .enumerate()
        .map(|(id, c)| ChannelLifespan {
            channel: id,
            capacity: c.capacity(),
            ebc: ebc[id],
            expected_payments: balanced_expected_payments(c.capacity(), omega),
            expected_days: balanced_expected_days(c.capacity(), omega, ebc[id], r),
            central: false,
        })
        .collect();

    let central_count = ((central_fraction * channels.len() as f64).round() as usize).max(1);
    for &id in ranking(&channels).iter().take(central_count) {
        channels[id].central = true;
    }
    let finite = |central_only: bool| -> Vec<f64> {
        channels
            .iter()
            .filter(|c| c.expected_days.is_finite() && (!central_only || c.central))
            .map(|c| c.expected_days)
            .collect()
    };
    let all = stats::summarize(&finite(false));
    let central = stats::summarize(&finite(true));
    Ok(SnapshotAnalysis {
        r,
        omega,
        central_fraction,
        infinite_count: channels.iter().filter(|c| c.expected_days.is_infinite()).count(),
        central_count,
        all,
        central,
        channels,
    })
}

/// Channel ids by betweenness, highest first; ties by id.
fn ranking(channels: &[ChannelLifespan]) -> Vec<ChannelId> {
    let mut order: Vec<ChannelId> = (0..channels.len()).collect();
    order.sort_by(|&i, &j| channels[j].ebc.total_cmp(&channels[i].ebc).then(i.cmp(&j)));
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Batch {
    pub channels: usize,
    pub mean_ebc: f64,
    pub mean_days: f64,
}

/// Channels with a finite lifespan, sorted by betweenness (highest first)
/// and cut into consecutive batches.
pub fn betweenness_lifespan_batches(analysis: &SnapshotAnalysis, batch_size: usize) -> Result<Vec<Batch>> {
    if batch_size == 0 {
        return Err(Error::invalid("batch_size", "must be at least 1"));
    }
    let order: Vec<&ChannelLifespan> = ranking(&analysis.channels)
        .into_iter()
        .map(|id| &analysis.channels[id])
        .filter(|c| c.expected_days.is_finite())
        .collect();
    Ok(order
        .chunks(batch_size)
        .map(|chunk| {
            let n = chunk.len() as f64;
            Batch {
                channels: chunk.len(),
                mean_ebc: chunk.iter().map(|c| c.ebc).sum::<f64>() / n,
                mean_days: chunk.iter().map(|c| c.expected_days).sum::<f64>() / n,
            }
        })
        .collect())
}

/// Spearman correlation between betweenness and lifespan over channels with
/// a finite lifespan.
pub fn betweenness_lifespan_correlation(analysis: &SnapshotAnalysis) -> Option<f64> {
    let (ebc, days): (Vec<f64>, Vec<f64>) = analysis
        .channels
        .iter()
        .filter(|c| c.expected_days.is_finite())
        .map(|c| (c.ebc, c.expected_days))
        .unzip();
    stats::spearman(&ebc, &days)
}

/// Histogram of finite lifespans. With `log10`, bin edges are powers of ten
/// of the returned bounds.
pub fn lifespan_histogram(analysis: &SnapshotAnalysis, bins: usize, log10: bool) -> Vec<Bin> {
    let values: Vec<f64> = analysis
        .channels
        .iter()
        .filter(|c| c.expected_days.is_finite() && c.expected_days > 0.0)
        .map(|c| if log10 { c.expected_days.log10() } else { c.expected_days })
        .collect();
    stats::histogram(&values, bins)
}

#[derive(Serialize)]
struct ChannelRow<'a> {
    channel_id: &'a str,
    node_a: &'a str,
    node_b: &'a str,
    capacity_sat: u64,
    ebc_pairs: f64,
    expected_payments: f64,
    expected_days: f64,
    central: bool,
}

/// Per-channel results. `ids` overrides the channel id column.
pub fn write_channel_lifespans<W: Write>(
    graph: &PaymentGraph,
    analysis: &SnapshotAnalysis,
    ids: Option<&[String]>,
    out: W,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for c in &analysis.channels {
        let id = match ids {
            Some(ids) => ids[c.channel].clone(),
            None => c.channel.to_string(),
        };
        let channel = graph.channel(c.channel);
        writer.serialize(ChannelRow {
            channel_id: &id,
            node_a: graph.label(channel.node_a),
            node_b: graph.label(channel.node_b),
            capacity_sat: c.capacity,
            ebc_pairs: c.ebc,
            expected_payments: c.expected_payments,
            expected_days: c.expected_days,
            central: c.central,
        })?;
    }
    writer.flush()?;
    Ok(())
}

/// Average, standard deviation and median lifespan for all and for central
/// channels.
pub fn write_summary<W: Write>(analysis: &SnapshotAnalysis, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([
        "subset",
        "channels",
        "infinite_excluded",
        "average_days",
        "std_days",
        "median_days",
    ])?;
    let central_infinite = analysis
        .channels
        .iter()
        .filter(|c| c.central && c.expected_days.is_infinite())
        .count();
    let rows = [
        ("all", analysis.channels.len(), analysis.infinite_count, analysis.all),
        ("central", analysis.central_count, central_infinite, analysis.central),
    ];
    for (name, count, infinite, summary) in rows {
        let fmt = |f: fn(&Summary) -> f64| summary.as_ref().map_or(String::new(), |s| format!("{:.4}", f(s)));
        writer.write_record([
            name.to_string(),
            count.to_string(),
            infinite.to_string(),
            fmt(|s| s.mean),
            fmt(|s| s.std),
            fmt(|s| s.median),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_histogram<W: Write>(bins: &[Bin], log10: bool, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    if log10 {
        writer.write_record(["lower_log10_days", "upper_log10_days", "channels"])?;
    } else {
        writer.write_record(["lower_days", "upper_days", "channels"])?;
    }
    for b in bins {
        writer.write_record([b.lower.to_string(), b.upper.to_string(), b.count.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_batches<W: Write>(batches: &[Batch], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["batch", "channels", "mean_ebc_pairs", "mean_lifespan_days"])?;
    for (i, b) in batches.iter().enumerate() {
        writer.write_record([
            i.to_string(),
            b.channels.to_string(),
            b.mean_ebc.to_string(),
            b.mean_days.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Path used in error messages for in-memory input.
pub fn memory_origin() -> PathBuf {
    PathBuf::from("<memory>")
}
