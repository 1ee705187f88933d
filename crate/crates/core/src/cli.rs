//! Command-line front end.
//!
//! Every subcommand that writes files puts them in `--out` together with a
//! `manifest.json` holding the resolved configuration, the seed and the
//! arguments needed to reproduce the run (`chanlife replay`).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{self, GridConfig};
use crate::lifespan::{self, ChannelSpec, WalkParams};
use crate::network::PaymentGraph;
use crate::simulator::{self, Selection, UnbalanceBench};
use crate::snapshot;
use crate::stats;
use crate::sweep;
use crate::traffic::{self, FundPolicy, MRatesConfig};
use crate::rng;

#[derive(Debug, Parser, Serialize)]
#[command(name = "chanlife", version, about = "Payment-channel lifespan model and routing simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Expected payments (and days) until a channel unbalances.
    Predict(PredictArgs),
    /// Replay a payment stream over a network and log channel imbalance.
    Simulate(SimulateArgs),
    /// Failure rate of a lone channel after its first imbalance.
    SingleChannel(SingleChannelArgs),
    /// Network success rate with a chosen set of channels forced one-sided.
    Unbalance(UnbalanceArgs),
    /// Predicted against simulated lifespans over an SC x SK grid.
    Evaluate(EvaluateArgs),
    /// Lifespan analysis of a channel-graph snapshot.
    Snapshot(SnapshotArgs),
    /// Lifespan curves along p, capacity and fund sizes.
    Sweep(SweepArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

fn probability(s: &str) -> std::result::Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(format!("{p} is not in (0, 1)"))
    }
}

fn fraction(s: &str) -> std::result::Result<f64, String> {
    let f: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&f) {
        Ok(f)
    } else {
        Err(format!("{f} is not in [0, 1]"))
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    /// Probability that a payment flows from A to B; derived from the rates
    /// when those are given instead.
    #[arg(long, value_parser = probability, required_unless_present = "rate_ab", conflicts_with = "rate_ab")]
    pub p: Option<f64>,
    /// A's funds, in payments.
    #[arg(long, required_unless_present = "fund_a", conflicts_with_all = ["fund_a", "fund_b"], requires = "b")]
    pub a: Option<u64>,
    /// B's funds, in payments.
    #[arg(long, requires = "a")]
    pub b: Option<u64>,
    /// A's funds, in satoshi.
    #[arg(long, requires = "fund_b")]
    pub fund_a: Option<u64>,
    /// B's funds, in satoshi.
    #[arg(long, requires = "fund_a")]
    pub fund_b: Option<u64>,
    /// Payment size, in satoshi.
    #[arg(long, default_value_t = traffic::DEFAULT_PAYMENT_SIZE)]
    pub omega: u64,
    /// Starting offset of the walk, in payments toward A's boundary.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub x: i64,
    /// Payments per day from A to B; together with --rate-ba gives days.
    #[arg(long, requires = "rate_ba")]
    pub rate_ab: Option<f64>,
    /// Payments per day from B to A.
    #[arg(long, requires = "rate_ab")]
    pub rate_ba: Option<f64>,
    /// Also write predict.csv and a manifest here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct NetworkArgs {
    /// Edge list CSV (node_a,node_b,fund_a_sat,fund_b_sat).
    #[arg(long, conflicts_with = "snapshot")]
    pub graph: Option<PathBuf>,
    /// Snapshot CSV (channel_id,node_a,node_b,capacity_sat), funds split evenly.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    /// Nodes of the generated G(n, p) network.
    #[arg(long, default_value_t = 50)]
    pub nodes: usize,
    /// Channel probability of the generated network.
    #[arg(long, default_value_t = 0.2, value_parser = fraction)]
    pub edge_prob: f64,
    /// Capacity of every generated channel, in satoshi.
    #[arg(long, default_value_t = traffic::DEFAULT_CAPACITY)]
    pub capacity: u64,
}

impl NetworkArgs {
    fn load(&self, seed: u64) -> Result<PaymentGraph> {
        if let Some(path) = &self.graph {
            PaymentGraph::read_edge_list(path)
        } else if let Some(path) = &self.snapshot {
            snapshot::load_snapshot(path)
        } else {
            traffic::random_network(
                self.nodes,
                self.edge_prob,
                FundPolicy::Balanced {
                    capacity: self.capacity,
                },
                rng::derive(seed, 1),
            )
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Run seed; generated and recorded in the manifest when absent.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Event log CSV (time_days,source,destination,amount_sat); generated
    /// from the rates knobs when absent.
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// Probability that a node pair exchanges no payments.
    #[arg(long, default_value_t = 0.0, value_parser = fraction)]
    pub sc: f64,
    /// Ratio between the two directional rates of a pair.
    #[arg(long, default_value_t = 1.0)]
    pub sk: f64,
    /// Payments per day sent by the favoured side of a pair.
    #[arg(long, default_value_t = 1.0)]
    pub base_rate: f64,
    /// Length of the generated stream, in days.
    #[arg(long, default_value_t = 100.0)]
    pub horizon: f64,
    /// Payment size, in satoshi.
    #[arg(long, default_value_t = traffic::DEFAULT_PAYMENT_SIZE)]
    pub omega: u64,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SingleChannelArgs {
    /// Direction probabilities, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = probability, default_value = "0.5,0.6,0.7,0.8,0.9")]
    pub p: Vec<f64>,
    /// Channel capacities in payments, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,20,40")]
    pub capacity_units: Vec<u64>,
    /// Payment size, in satoshi.
    #[arg(long, default_value_t = traffic::DEFAULT_PAYMENT_SIZE)]
    pub omega: u64,
    /// Payments per run.
    #[arg(long, default_value_t = 5000)]
    pub payments: u64,
    /// Runs per (p, capacity).
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Random,
    Top,
    Window,
}

#[derive(Debug, Args, Serialize)]
pub struct UnbalanceArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[arg(long, value_enum, default_value_t = Strategy::Random)]
    pub strategy: Strategy,
    /// Share of channels forced one-sided (window width for `window`).
    #[arg(long, default_value_t = 0.15, value_parser = fraction)]
    pub fraction: f64,
    /// First betweenness rank of the window (0 is the most central).
    #[arg(long, default_value_t = 0)]
    pub start_rank: usize,
    /// Payments per run.
    #[arg(long, default_value_t = 5000)]
    pub payments: u64,
    /// Payment size, in satoshi.
    #[arg(long, default_value_t = traffic::DEFAULT_PAYMENT_SIZE)]
    pub omega: u64,
    /// Independent runs.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, value_parser = fraction)]
    pub edge_prob: Option<f64>,
    /// Sparse coefficients, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sc: Option<Vec<f64>>,
    /// Skews, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sk: Option<Vec<f64>>,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SnapshotArgs {
    /// Snapshot CSV (channel_id,node_a,node_b,capacity_sat).
    #[arg(long)]
    pub file: PathBuf,
    /// Payments per day between any two nodes.
    #[arg(long, default_value_t = snapshot::DEFAULT_PAIR_RATE)]
    pub r: f64,
    /// Payment size, in satoshi.
    #[arg(long, default_value_t = traffic::DEFAULT_PAYMENT_SIZE)]
    pub omega: u64,
    #[arg(long, default_value_t = snapshot::DEFAULT_CENTRAL_FRACTION, value_parser = fraction)]
    pub central_fraction: f64,
    /// Histogram bins.
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    /// Bin log10(days) instead of days.
    #[arg(long)]
    pub log_bins: bool,
    /// Channels per betweenness batch.
    #[arg(long, default_value_t = 100)]
    pub batch_size: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Balanced capacities for the p sweep, in payments.
    #[arg(long, value_delimiter = ',', default_value = "20,40,80")]
    pub capacities: Vec<u64>,
    /// Resolution of every p grid.
    #[arg(long, default_value_t = 0.01)]
    pub p_step: f64,
    /// p values for the capacity and own-fund sweeps.
    #[arg(long, value_delimiter = ',', value_parser = probability, default_value = "0.3,0.4,0.5,0.6,0.7")]
    pub ps: Vec<f64>,
    /// Largest capacity or fund swept, in payments.
    #[arg(long, default_value_t = 200)]
    pub max_units: u64,
    /// Fixed own fund for the peer-fund sweep, in payments.
    #[arg(long, default_value_t = 20)]
    pub own_fund: u64,
    /// Fixed peer fund for the own-fund sweep, in payments.
    #[arg(long, default_value_t = 20)]
    pub peer_fund: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    /// manifest.json of the run to repeat.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory; defaults to the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    /// Arguments after the program name, without `--out`.
    pub args: Vec<String>,
    pub out: PathBuf,
    pub config: serde_json::Value,
}

/// Parses `std::env::args`, runs, and maps errors to exit codes.
pub fn run_from_env() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    match execute(cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Runs a parsed command; `argv` (without the program name) is recorded in
/// the manifest.
pub fn execute(mut cli: Cli, argv: &[String]) -> Result<()> {
    let seed = match &mut cli.command {
        Command::Simulate(a) => Some(resolve_seed(&mut a.output.seed)),
        Command::SingleChannel(a) => Some(resolve_seed(&mut a.output.seed)),
        Command::Unbalance(a) => Some(resolve_seed(&mut a.output.seed)),
        Command::Evaluate(a) => {
            if a.output.seed.is_none() {
                a.output.seed = config_seed(&a.config)?;
            }
            Some(resolve_seed(&mut a.output.seed))
        }
        _ => None,
    };
    let mut args = strip_out(argv);
    if let Some(s) = seed {
        if !args.iter().any(|a| a == "--seed" || a.starts_with("--seed=")) {
            args.push("--seed".into());
            args.push(s.to_string());
        }
    }
    let name = command_name(&cli.command).to_string();
    let out = match &cli.command {
        Command::Predict(a) => a.out.clone(),
        Command::Simulate(a) => Some(a.output.out.clone()),
        Command::SingleChannel(a) => Some(a.output.out.clone()),
        Command::Unbalance(a) => Some(a.output.out.clone()),
        Command::Evaluate(a) => Some(a.output.out.clone()),
        Command::Snapshot(a) => Some(a.out.clone()),
        Command::Sweep(a) => Some(a.out.clone()),
        Command::Replay(a) => return replay(a),
    };
    if let Some(dir) = &out {
        std::fs::create_dir_all(dir)?;
    }
    let config = match &cli.command {
        Command::Predict(a) => cmd_predict(a)?,
        Command::Simulate(a) => cmd_simulate(a)?,
        Command::SingleChannel(a) => cmd_single_channel(a)?,
        Command::Unbalance(a) => cmd_unbalance(a)?,
        Command::Evaluate(a) => cmd_evaluate(a)?,
        Command::Snapshot(a) => cmd_snapshot(a)?,
        Command::Sweep(a) => cmd_sweep(a)?,
        Command::Replay(_) => unreachable!(),
    };
    if let Some(dir) = out {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: name,
            seed,
            args,
            out: dir.clone(),
            config,
        };
        let mut file = create(&dir, "manifest.json")?;
        serde_json::to_writer_pretty(&mut file, &manifest)?;
        writeln!(file)?;
        file.flush()?;
    }
    Ok(())
}

fn replay(args: &ReplayArgs) -> Result<()> {
    let manifest: Manifest = serde_json::from_reader(File::open(&args.manifest)?)?;
    let out = args.out.clone().unwrap_or(manifest.out);
    let mut argv = manifest.args;
    argv.push("--out".into());
    argv.push(out.display().to_string());
    let cli = Cli::try_parse_from(std::iter::once("chanlife".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| Error::Config(format!("manifest arguments no longer parse: {e}")))?;
    execute(cli, &argv)
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Predict(_) => "predict",
        Command::Simulate(_) => "simulate",
        Command::SingleChannel(_) => "single-channel",
        Command::Unbalance(_) => "unbalance",
        Command::Evaluate(_) => "evaluate",
        Command::Snapshot(_) => "snapshot",
        Command::Sweep(_) => "sweep",
        Command::Replay(_) => "replay",
    }
}

fn resolve_seed(seed: &mut Option<u64>) -> u64 {
    *seed.get_or_insert_with(|| {
        let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos());
        // fits a TOML integer
        rng::derive(nanos as u64, std::process::id() as u64) >> 1
    })
}

/// The `seed` key of an evaluation config, if it has one.
fn config_seed(path: &Path) -> Result<Option<u64>> {
    let table: toml::Table = std::fs::read_to_string(path)?
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(format!("{}: {}", path.display(), e.message())))?;
    match table.get("seed") {
        None => Ok(None),
        Some(toml::Value::Integer(s)) if *s >= 0 => Ok(Some(*s as u64)),
        Some(other) => Err(Error::Config(format!("`seed` must be a non-negative integer, got {other}"))),
    }
}

fn strip_out(argv: &[String]) -> Vec<String> {
    let mut args = Vec::with_capacity(argv.len());
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            args.push(a.clone());
        }
    }
    args
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn to_json<T: Serialize>(value: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(value)?)
}

fn cmd_predict(args: &PredictArgs) -> Result<serde_json::Value> {
    let (a, b) = match (args.a, args.b, args.fund_a, args.fund_b) {
        (Some(a), Some(b), _, _) => (a, b),
        (_, _, Some(fa), Some(fb)) => {
            let walk = lifespan::discretize_funds(&ChannelSpec::new(fa, fb, args.omega))?;
            (walk.a(), walk.b())
        }
        _ => return Err(Error::Config("give either --a/--b or --fund-a/--fund-b".into())),
    };
    let rates = args.rate_ab.zip(args.rate_ba);
    let p = match (args.p, rates) {
        (Some(p), _) => p,
        (None, Some((ab, ba))) => lifespan::direction_probability(ab, ba)?,
        (None, None) => return Err(Error::Config("give --p or --rate-ab/--rate-ba".into())),
    };
    let walk = WalkParams::new(p, a, b)?.starting_at(args.x)?;
    let estimate = lifespan::estimate(&walk, rates)?;
    println!("expected_payments: {}", estimate.expected_payments);
    if let Some(days) = estimate.expected_days {
        println!("expected_days: {days}");
    }
    if let Some(dir) = &args.out {
        let mut w = csv::Writer::from_writer(create(dir, "predict.csv")?);
        w.write_record(["p", "a_payments", "b_payments", "x_payments", "expected_payments", "expected_days"])?;
        w.write_record([
            p.to_string(),
            a.to_string(),
            b.to_string(),
            args.x.to_string(),
            estimate.expected_payments.to_string(),
            estimate.expected_days.map_or(String::new(), |d| d.to_string()),
        ])?;
        w.flush()?;
    }
    to_json(args)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<serde_json::Value> {
    let seed = args.output.seed.expect("seed resolved");
    let out = &args.output.out;
    let graph = args.network.load(seed)?;
    let events = match &args.events {
        Some(path) => traffic::read_events(File::open(path)?)?,
        None => {
            let rates = traffic::generate_mrates(&MRatesConfig {
                n: graph.node_count(),
                sparse_coefficient: args.sc,
                skew: args.sk,
                base_rate: args.base_rate,
                seed: rng::derive(seed, 2),
            })?;
            traffic::generate_payment_stream(&rates, args.horizon, args.omega, rng::derive(seed, 3))?
        }
    };
    let result = simulator::run_simulation(&graph, &events, args.omega, rng::derive(seed, 4))?;
    let mut edges = csv::Writer::from_writer(create(out, "network.csv")?);
    for record in graph.records() {
        edges.serialize(record)?;
    }
    edges.flush()?;
    traffic::write_events(&events, create(out, "events.csv")?)?;
    simulator::write_channel_results(&graph, &result, create(out, "channels.csv")?)?;
    let summary = result.summary();
    let mut file = create(out, "summary.json")?;
    serde_json::to_writer_pretty(&mut file, &summary)?;
    writeln!(file)?;
    file.flush()?;
    println!(
        "{} payments, {} succeeded, {} of {} channels unbalanced",
        summary.network_attempts, summary.network_successes, summary.unbalanced_channels, summary.channels
    );
    to_json(args)
}

fn cmd_single_channel(args: &SingleChannelArgs) -> Result<serde_json::Value> {
    let seed = args.output.seed.expect("seed resolved");
    let mut w = csv::Writer::from_writer(create(&args.output.out, "single_channel.csv")?);
    w.write_record([
        "p",
        "capacity_payments",
        "run",
        "first_unbalance_payment",
        "attempts_after_payments",
        "failures_after_payments",
        "failure_rate",
    ])?;
    println!("p     capacity_payments  mean_failure_rate  runs_unbalanced");
    for &p in &args.p {
        for &units in &args.capacity_units {
            let mut rates = Vec::new();
            for run in 0..args.seeds {
                let outcome = simulator::single_channel_experiment(
                    p,
                    units * args.omega,
                    args.omega,
                    args.payments,
                    rng::derive(seed, run),
                );
                let row = match outcome {
                    Ok(o) => {
                        rates.push(o.failure_rate);
                        [
                            o.first_unbalance_payment.to_string(),
                            o.attempts_after.to_string(),
                            o.failures_after.to_string(),
                            o.failure_rate.to_string(),
                        ]
                    }
                    Err(Error::NoUnbalanceObserved { .. }) => Default::default(),
                    Err(e) => return Err(e),
                };
                w.write_record(
                    [p.to_string(), units.to_string(), run.to_string()]
                        .into_iter()
                        .chain(row),
                )?;
            }
            let mean = stats::summarize(&rates).map_or(f64::NAN, |s| s.mean);
            println!("{p:<5} {units:<18} {mean:<18.4} {}", rates.len());
        }
    }
    w.flush()?;
    to_json(args)
}

fn cmd_unbalance(args: &UnbalanceArgs) -> Result<serde_json::Value> {
    let seed = args.output.seed.expect("seed resolved");
    let graph = args.network.load(seed)?;
    let bench = UnbalanceBench::new(&graph);
    let selection = match args.strategy {
        Strategy::Random => Selection::Random { fraction: args.fraction },
        Strategy::Top => Selection::TopBetweenness { fraction: args.fraction },
        Strategy::Window => Selection::Window {
            start_rank: args.start_rank,
            width: (args.fraction * graph.channel_count() as f64).round() as usize,
        },
    };
    let mut w = csv::Writer::from_writer(create(&args.output.out, "unbalance.csv")?);
    w.write_record(["run", "forced_channels", "attempts_payments", "successes_payments", "success_rate"])?;
    let mut rates = Vec::new();
    for run in 0..args.seeds {
        let o = bench.run(selection, args.payments, args.omega, rng::derive(seed, 100 + run))?;
        w.write_record([
            run.to_string(),
            o.forced.len().to_string(),
            o.attempts.to_string(),
            o.successes.to_string(),
            o.success_rate.to_string(),
        ])?;
        rates.push(o.success_rate);
    }
    w.flush()?;
    if let Some(s) = stats::summarize(&rates) {
        println!("mean success rate {:.4} (std {:.4}, {} runs)", s.mean, s.std, s.count);
    }
    to_json(args)
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(format!("{}: {}", args.config.display(), e.message())))?;
    let seed = args.output.seed.expect("seed resolved");
    let seed = i64::try_from(seed).map_err(|_| Error::Config(format!("seed {seed} does not fit a TOML integer")))?;
    table.insert("seed".into(), toml::Value::Integer(seed));
    if let Some(v) = args.iterations {
        table.insert("iterations".into(), toml::Value::Integer(v as i64));
    }
    if let Some(v) = args.nodes {
        table.insert("nodes".into(), toml::Value::Integer(v as i64));
    }
    if let Some(v) = args.edge_prob {
        table.insert("edge_prob".into(), toml::Value::Float(v));
    }
    if let Some(v) = &args.sc {
        table.insert("sc".into(), toml::Value::Array(v.iter().map(|&x| toml::Value::Float(x)).collect()));
    }
    if let Some(v) = &args.sk {
        table.insert("sk".into(), toml::Value::Array(v.iter().map(|&x| toml::Value::Float(x)).collect()));
    }
    let config = GridConfig::from_toml(&toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?)?;
    let out = &args.output.out;
    let cells = evaluation::evaluate_grid(&config)?;
    evaluation::write_grid_table(&config, &cells, create(out, "table.csv")?)?;
    evaluation::write_grid_details(&cells, create(out, "channels.csv")?)?;
    std::fs::write(out.join("config.toml"), config.to_toml())?;
    for cell in &cells {
        println!(
            "sc={} sk={} mean_relative_error={:.4} included={} excluded={}",
            cell.sparse_coefficient,
            cell.skew,
            cell.report.mean_relative_error,
            cell.report.included_count,
            cell.report.excluded_count
        );
    }
    to_json(&config)
}

fn cmd_snapshot(args: &SnapshotArgs) -> Result<serde_json::Value> {
    let loaded = snapshot::read_snapshot_file(&args.file)?;
    let analysis = snapshot::analyze_snapshot_with(&loaded.graph, args.r, args.omega, args.central_fraction)?;
    let out = &args.out;
    snapshot::write_channel_lifespans(
        &loaded.graph,
        &analysis,
        Some(&loaded.channel_ids),
        create(out, "channels.csv")?,
    )?;
    snapshot::write_summary(&analysis, create(out, "summary.csv")?)?;
    let bins = snapshot::lifespan_histogram(&analysis, args.bins, args.log_bins);
    snapshot::write_histogram(&bins, args.log_bins, create(out, "histogram.csv")?)?;
    let batches = snapshot::betweenness_lifespan_batches(&analysis, args.batch_size)?;
    snapshot::write_batches(&batches, create(out, "batches.csv")?)?;
    println!(
        "{} channels ({} merged rows, {} with infinite lifespan)",
        analysis.channels.len(),
        loaded.merged_rows,
        analysis.infinite_count
    );
    for (name, s) in [("all", analysis.all), ("central", analysis.central)] {
        if let Some(s) = s {
            println!(
                "{name:<8} average {:.1} days, std {:.1} days, median {:.1} days",
                s.mean, s.std, s.median
            );
        }
    }
    if let Some(rho) = snapshot::betweenness_lifespan_correlation(&analysis) {
        println!("spearman(ebc, lifespan) = {rho:.4}");
    }
    to_json(args)
}

fn cmd_sweep(args: &SweepArgs) -> Result<serde_json::Value> {
    let grid = sweep::p_grid(args.p_step)?;
    let units: Vec<u64> = (2..=args.max_units).collect();
    let funds: Vec<u64> = (1..=args.max_units).collect();
    let out = &args.out;
    sweep::write_rows(&sweep::p_sweep(&args.capacities, &grid)?, create(out, "p_sweep.csv")?)?;
    sweep::write_rows(&sweep::capacity_sweep(&args.ps, &units)?, create(out, "capacity_sweep.csv")?)?;
    sweep::write_rows(
        &sweep::own_fund_sweep(args.peer_fund, &funds, &args.ps)?,
        create(out, "own_fund_sweep.csv")?,
    )?;
    sweep::write_rows(
        &sweep::peer_fund_sweep(args.own_fund, &funds, &grid)?,
        create(out, "peer_fund_sweep.csv")?,
    )?;
    println!("wrote p, capacity, own-fund and peer-fund sweeps to {}", out.display());
    to_json(args)
}
