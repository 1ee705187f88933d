//! Predicted versus simulated channel lifespans.
//!
//! One random network and rates matrix are drawn per configuration. Every
//! channel's lifespan is predicted from the topology, then `iterations`
//! independent payment streams are replayed through the simulator and each
//! channel's observed lifespan (payments moved across it before its first
//! imbalance) is averaged. The error of a channel is
//! `|observed - predicted| / observed`.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifespan::{self, ChannelSpec, LifespanEstimate};
use crate::network::{channel_rates, edge_payment_rates, ChannelId, PaymentGraph, RatesMatrix};
use crate::rng;
use crate::simulator::{ShortestPathIndex, Simulation};
use crate::stats;
use crate::traffic::{self, FundPolicy, MRatesConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionStatus {
    Ok,
    /// No payment flows over the channel in either direction.
    Dead,
    /// A side holds less than one payment.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelPrediction {
    pub channel: ChannelId,
    pub lambda_ab: f64,
    pub lambda_ba: f64,
    pub p: Option<f64>,
    pub estimate: Option<LifespanEstimate>,
    pub status: PredictionStatus,
}

impl ChannelPrediction {
    pub fn expected_payments(&self) -> Option<f64> {
        self.estimate.map(|e| e.expected_payments)
    }

    pub fn expected_days(&self) -> Option<f64> {
        self.estimate.and_then(|e| e.expected_days)
    }
}

/// Rates per edge, then `p`, boundaries, expected payments and days for
/// every channel. Dead and degenerate channels are kept and flagged.
pub fn predict_all_lifespans(
    graph: &PaymentGraph,
    rates: &RatesMatrix,
    omega: u64,
) -> Result<Vec<ChannelPrediction>> {
    if omega == 0 {
        return Err(Error::invalid("omega", "payment size must be positive"));
    }
    let edge_rates = edge_payment_rates(graph, rates)?;
    graph
        .channels()
        .iter()
        .enumerate()
        .map(|(id, c)| {
            let (lambda_ab, lambda_ba) = channel_rates(&edge_rates, id);
            let mut prediction = ChannelPrediction {
                channel: id,
                lambda_ab,
                lambda_ba,
                p: None,
                estimate: None,
                status: PredictionStatus::Ok,
            };
            let p = match lifespan::direction_probability(lambda_ab, lambda_ba) {
                Ok(p) => p,
                Err(Error::DeadChannel) => {
                    prediction.status = PredictionStatus::Dead;
                    return Ok(prediction);
                }
                Err(e) => return Err(e),
            };
            prediction.p = Some(p);
            let walk = match lifespan::discretize_funds(&ChannelSpec::new(c.fund_a, c.fund_b, omega)) {
                Ok(walk) => walk,
                Err(Error::DegenerateChannel { .. }) => {
                    prediction.status = PredictionStatus::Degenerate;
                    return Ok(prediction);
                }
                Err(e) => return Err(e),
            };
            // p of exactly 0 or 1 means every payment goes one way
            let steps = if p <= 0.0 {
                walk.b() as f64
            } else if p >= 1.0 {
                walk.a() as f64
            } else {
                lifespan::expected_steps(&walk.with_p(p)?)?
            };
            prediction.estimate = Some(LifespanEstimate {
                expected_payments: steps,
                expected_days: Some(lifespan::expected_lifetime(steps, lambda_ab, lambda_ba)?),
            });
            Ok(prediction)
        })
        .collect()
}

fn default_percentile() -> f64 {
    0.95
}

fn default_min_unbalanced() -> f64 {
    0.2
}

fn default_horizon_factor() -> f64 {
    4.0
}

/// One cell of the evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationConfig {
    pub nodes: usize,
    pub edge_prob: f64,
    pub sparse_coefficient: f64,
    pub skew: f64,
    /// Payments per day sent by the favoured side of an active pair.
    pub base_rate: f64,
    pub iterations: usize,
    pub omega: u64,
    /// Capacity of every generated channel, split evenly.
    pub capacity: u64,
    /// Channels predicted to live longer than this quantile of predicted
    /// lifespans are excluded from the error.
    #[serde(default = "default_percentile")]
    pub abnormality_percentile: f64,
    /// Channels unbalanced in fewer than this share of iterations are
    /// excluded from the error.
    #[serde(default = "default_min_unbalanced")]
    pub min_unbalanced_fraction: f64,
    /// Simulated horizon as a multiple of the abnormality threshold (days).
    #[serde(default = "default_horizon_factor")]
    pub horizon_factor: f64,
    pub seed: u64,
}

impl EvaluationConfig {
    /// 50-node G(n, 0.2) network, 100 iterations, 2.4 Msat channels and
    /// 60 ksat payments.
    pub fn reference(sparse_coefficient: f64, skew: f64, seed: u64) -> Self {
        Self {
            nodes: 50,
            edge_prob: 0.2,
            sparse_coefficient,
            skew,
            base_rate: 1.0,
            iterations: 100,
            omega: traffic::DEFAULT_PAYMENT_SIZE,
            capacity: traffic::DEFAULT_CAPACITY,
            abnormality_percentile: default_percentile(),
            min_unbalanced_fraction: default_min_unbalanced(),
            horizon_factor: default_horizon_factor(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("iterations", "must be at least 1"));
        }
        if !(self.abnormality_percentile > 0.0 && self.abnormality_percentile <= 1.0) {
            return Err(Error::invalid(
                "abnormality_percentile",
                format!("{} is not in (0, 1]", self.abnormality_percentile),
            ));
        }
        if !(0.0..=1.0).contains(&self.min_unbalanced_fraction) {
            return Err(Error::invalid(
                "min_unbalanced_fraction",
                format!("{} is not in [0, 1]", self.min_unbalanced_fraction),
            ));
        }
        if self.horizon_factor.is_nan() || self.horizon_factor <= 0.0 {
            return Err(Error::invalid("horizon_factor", "must be positive"));
        }
        self.mrates_config().validate()
    }

    pub fn mrates_config(&self) -> MRatesConfig {
        MRatesConfig {
            n: self.nodes,
            sparse_coefficient: self.sparse_coefficient,
            skew: self.skew,
            base_rate: self.base_rate,
            seed: rng::derive(self.seed, 2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    Dead,
    Degenerate,
    /// Predicted lifespan above the abnormality threshold.
    LongPredicted,
    /// Unbalanced in too few iterations (includes never).
    RarelyUnbalanced,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelError {
    pub channel: ChannelId,
    pub predicted_payments: Option<f64>,
    pub predicted_days: Option<f64>,
    pub p: Option<f64>,
    pub observed_mean_payments: Option<f64>,
    pub unbalanced_iterations: usize,
    pub relative_error: Option<f64>,
    pub excluded: Option<Exclusion>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub channels: Vec<ChannelError>,
    /// Mean relative error over included channels; NaN if none are included.
    pub mean_relative_error: f64,
    pub included_count: usize,
    pub excluded_count: usize,
    pub iterations: usize,
    pub horizon_days: f64,
}

/// `|observed - predicted| / observed`.
pub fn relative_error(observed: f64, predicted: f64) -> f64 {
    (observed - predicted).abs() / observed
}

/// Generates the network and rates from `config`, then compares.
pub fn evaluate(config: &EvaluationConfig) -> Result<ErrorReport> {
    config.validate()?;
    let graph = traffic::random_network(
        config.nodes,
        config.edge_prob,
        FundPolicy::Balanced {
            capacity: config.capacity,
        },
        rng::derive(config.seed, 1),
    )?;
    let rates = traffic::generate_mrates(&config.mrates_config())?;
    evaluate_on(&graph, &rates, config)
}

/// Compares prediction and simulation on a given network and rates matrix.
/// The network parameters of `config` are ignored.
pub fn evaluate_on(
    graph: &PaymentGraph,
    rates: &RatesMatrix,
    config: &EvaluationConfig,
) -> Result<ErrorReport> {
    config.validate()?;
    let predictions = predict_all_lifespans(graph, rates, config.omega)?;
    let live_days: Vec<f64> = predictions.iter().filter_map(|p| p.expected_days()).collect();
    if live_days.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let threshold = stats::quantile(&live_days, config.abnormality_percentile);
    let horizon = config.horizon_factor * threshold;

    let index = ShortestPathIndex::new(graph);
    let runs: Vec<Vec<Option<u64>>> = (0..config.iterations)
        .into_par_iter()
        .map(|i| {
            let events = traffic::generate_payment_stream(
                rates,
                horizon,
                config.omega,
                rng::derive(config.seed, 1_000 + i as u64),
            )?;
            let mut sim = Simulation::new(&index, config.omega, rng::derive(config.seed, 5_000_000 + i as u64))?;
            for event in &events {
                if sim.all_unbalanced() {
                    break;
                }
                sim.route(event)?;
            }
            Ok(sim.states().iter().map(|s| s.first_unbalance_step).collect())
        })
        .collect::<Result<_>>()?;

    let mut channels = Vec::with_capacity(predictions.len());
    for prediction in &predictions {
        let id = prediction.channel;
        let observed: Vec<f64> = runs.iter().filter_map(|r| r[id]).map(|s| s as f64).collect();
        let observed_mean = (!observed.is_empty())
            .then(|| observed.iter().sum::<f64>() / observed.len() as f64);
        let unbalanced_share = observed.len() as f64 / config.iterations as f64;
        let excluded = match (prediction.status, prediction.expected_days()) {
            (PredictionStatus::Dead, _) => Some(Exclusion::Dead),
            (PredictionStatus::Degenerate, _) => Some(Exclusion::Degenerate),
            (_, Some(days)) if days > threshold => Some(Exclusion::LongPredicted),
            _ if unbalanced_share < config.min_unbalanced_fraction || observed_mean.is_none() => {
                Some(Exclusion::RarelyUnbalanced)
            }
            _ => None,
        };
        let relative = match (observed_mean, prediction.expected_payments()) {
            (Some(obs), Some(pred)) if obs > 0.0 => Some(relative_error(obs, pred)),
            _ => None,
        };
        channels.push(ChannelError {
            channel: id,
            predicted_payments: prediction.expected_payments(),
            predicted_days: prediction.expected_days(),
            p: prediction.p,
            observed_mean_payments: observed_mean,
            unbalanced_iterations: observed.len(),
            relative_error: relative,
            excluded,
        });
    }
    let included: Vec<f64> = channels
        .iter()
        .filter(|c| c.excluded.is_none())
        .filter_map(|c| c.relative_error)
        .collect();
    let included_count = included.len();
    Ok(ErrorReport {
        mean_relative_error: if included.is_empty() {
            f64::NAN
        } else {
            included.iter().sum::<f64>() / included_count as f64
        },
        included_count,
        excluded_count: channels.len() - included_count,
        channels,
        iterations: config.iterations,
        horizon_days: horizon,
    })
}

/// Run-configuration file for a grid of evaluations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nodes: usize,
    pub edge_prob: f64,
    pub iterations: usize,
    pub omega_sat: u64,
    pub capacity_sat: u64,
    pub base_rate_per_day: f64,
    pub seed: u64,
    pub sc: Vec<f64>,
    pub sk: Vec<f64>,
    #[serde(default = "default_percentile")]
    pub abnormality_percentile: f64,
    #[serde(default = "default_min_unbalanced")]
    pub min_unbalanced_fraction: f64,
    #[serde(default = "default_horizon_factor")]
    pub horizon_factor: f64,
}

impl GridConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: GridConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        if config.sc.is_empty() {
            return Err(Error::Config("`sc` must list at least one value".into()));
        }
        if config.sk.is_empty() {
            return Err(Error::Config("`sk` must list at least one value".into()));
        }
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("grid config serializes")
    }

    pub fn cell(&self, sparse_coefficient: f64, skew: f64) -> EvaluationConfig {
        EvaluationConfig {
            nodes: self.nodes,
            edge_prob: self.edge_prob,
            sparse_coefficient,
            skew,
            base_rate: self.base_rate_per_day,
            iterations: self.iterations,
            omega: self.omega_sat,
            capacity: self.capacity_sat,
            abnormality_percentile: self.abnormality_percentile,
            min_unbalanced_fraction: self.min_unbalanced_fraction,
            horizon_factor: self.horizon_factor,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub sparse_coefficient: f64,
    pub skew: f64,
    pub report: ErrorReport,
}

/// Evaluates every `(sc, sk)` combination, rows in `sc` order.
pub fn evaluate_grid(config: &GridConfig) -> Result<Vec<GridCell>> {
    let mut cells = Vec::new();
    for &sc in &config.sc {
        for &sk in &config.sk {
            let report = evaluate(&config.cell(sc, sk))?;
            cells.push(GridCell {
                sparse_coefficient: sc,
                skew: sk,
                report,
            });
        }
    }
    Ok(cells)
}

/// Mean relative errors as a table: one row per SC, one column per SK.
pub fn write_grid_table<W: Write>(config: &GridConfig, cells: &[GridCell], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["sc\\sk_mean_relative_error".to_string()];
    header.extend(config.sk.iter().map(|sk| format!("sk={sk}")));
    writer.write_record(&header)?;
    for &sc in &config.sc {
        let mut row = vec![format!("{sc}")];
        for &sk in &config.sk {
            let cell = cells
                .iter()
                .find(|c| c.sparse_coefficient == sc && c.skew == sk)
                .ok_or_else(|| Error::Config(format!("missing cell sc={sc} sk={sk}")))?;
            row.push(format!("{:.4}", cell.report.mean_relative_error));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DetailRow {
    sc: f64,
    sk: f64,
    channel_id: ChannelId,
    p: Option<f64>,
    predicted_payments: Option<f64>,
    predicted_days: Option<f64>,
    observed_mean_payments: Option<f64>,
    unbalanced_iterations: usize,
    relative_error: Option<f64>,
    excluded: String,
}

/// Per-channel detail for every grid cell.
pub fn write_grid_details<W: Write>(cells: &[GridCell], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for cell in cells {
        for c in &cell.report.channels {
            writer.serialize(DetailRow {
                sc: cell.sparse_coefficient,
                sk: cell.skew,
                channel_id: c.channel,
                p: c.p,
                predicted_payments: c.predicted_payments,
                predicted_days: c.predicted_days,
                observed_mean_payments: c.observed_mean_payments,
                unbalanced_iterations: c.unbalanced_iterations,
                relative_error: c.relative_error,
                excluded: c
                    .excluded
                    .map(|e| serde_json::to_value(e).unwrap().as_str().unwrap_or_default().to_string())
                    .unwrap_or_default(),
            })?;
        }
    }
    writer.flush()?;
    Ok(())
}
