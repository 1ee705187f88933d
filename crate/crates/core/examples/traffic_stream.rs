//! Random network, sparse and skewed rates matrix, and the Poisson payment
//! stream it implies, written as CSV.
//!
//! ```text
//! cargo run --example traffic_stream -- [out_dir]
//! ```

use std::fs::File;
use std::path::PathBuf;

use chanlife::traffic::{self, FundPolicy, MRatesConfig};

fn main() -> chanlife::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "traffic-out".into()));
    std::fs::create_dir_all(&out)?;

    let graph = traffic::random_network(50, 0.2, FundPolicy::default(), 1)?;
    let rates = traffic::generate_mrates(&MRatesConfig {
        n: 50,
        sparse_coefficient: 0.5,
        skew: 4.0,
        base_rate: 1.0,
        seed: 2,
    })?;
    let events = traffic::generate_payment_stream(&rates, 10.0, traffic::DEFAULT_PAYMENT_SIZE, 3)?;

    graph.write_edge_list(out.join("network.csv"))?;
    traffic::write_events(&events, File::create(out.join("events.csv"))?)?;
    println!(
        "{} channels, {} active pairs, total {:.0} payments/day, {} events over 10 days -> {}",
        graph.channel_count(),
        rates.active_pairs().count(),
        rates.total_rate(),
        events.len(),
        out.display()
    );
    Ok(())
}
