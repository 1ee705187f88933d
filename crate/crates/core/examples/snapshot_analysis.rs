//! Lifespan distribution of a channel-graph snapshot under uniform pairwise
//! traffic. Reads a snapshot CSV if given, otherwise builds a synthetic one.
//!
//! ```text
//! cargo run --release --example snapshot_analysis -- [snapshot.csv]
//! ```

use chanlife::network::PaymentGraph;
use chanlife::snapshot::{self, analyze_snapshot};
use chanlife::traffic::{self, FundPolicy};

fn main() -> chanlife::Result<()> {
    let graph: PaymentGraph = match std::env::args().nth(1) {
        Some(path) => snapshot::load_snapshot(path)?,
        None => traffic::preferential_attachment(1_000, 2, FundPolicy::default(), 19)?,
    };
    let analysis = analyze_snapshot(&graph, snapshot::DEFAULT_PAIR_RATE, traffic::DEFAULT_PAYMENT_SIZE)?;

    println!("{} channels\n", analysis.channels.len());
    println!("subset    average_days  std_days   median_days");
    for (name, s) in [("all", analysis.all), ("central", analysis.central)] {
        let s = s.expect("finite lifespans");
        println!("{name:<9} {:<13.1} {:<10.1} {:.1}", s.mean, s.std, s.median);
    }
    println!(
        "\nspearman(ebc, lifespan) = {:.3}",
        snapshot::betweenness_lifespan_correlation(&analysis).unwrap_or(f64::NAN)
    );

    println!("\nbatch  mean_ebc   mean_days");
    for (i, b) in snapshot::betweenness_lifespan_batches(&analysis, 200)?.iter().enumerate() {
        println!("{i:<6} {:<10.1} {:.1}", b.mean_ebc, b.mean_days);
    }

    println!("\nlog10(days) histogram");
    for bin in snapshot::lifespan_histogram(&analysis, 12, true) {
        println!("{:>6.2} {}", bin.lower, "#".repeat(bin.count.div_ceil(10)));
    }
    Ok(())
}
