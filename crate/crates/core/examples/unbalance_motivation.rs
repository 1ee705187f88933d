//! Network success rate when channels are forced one-sided: a growing random
//! share, the most central 15%, and a 15% window sliding down the
//! betweenness ranking.
//!
//! ```text
//! cargo run --release --example unbalance_motivation -- [nodes] [seeds]
//! ```

use chanlife::simulator::{Selection, UnbalanceBench};
use chanlife::traffic::{self, FundPolicy};
use chanlife::{rng, stats};

const PAYMENTS: u64 = 5_000;
const OMEGA: u64 = traffic::DEFAULT_PAYMENT_SIZE;

fn mean_success(bench: &UnbalanceBench, selection: Selection, seeds: u64) -> chanlife::Result<f64> {
    let mut rates = Vec::new();
    for s in 0..seeds {
        rates.push(bench.run(selection, PAYMENTS, OMEGA, rng::derive(11, s))?.success_rate);
    }
    Ok(stats::summarize(&rates).map_or(f64::NAN, |s| s.mean))
}

fn main() -> chanlife::Result<()> {
    let mut args = std::env::args().skip(1);
    let nodes = args.next().map_or(200, |s| s.parse().expect("nodes"));
    let seeds = args.next().map_or(20, |s| s.parse().expect("seeds"));

    // hub-heavy like a real channel graph
    let graph = traffic::preferential_attachment(nodes, 2, FundPolicy::default(), 5)?;
    let bench = UnbalanceBench::new(&graph);
    println!("{} nodes, {} channels, {seeds} runs of {PAYMENTS} payments\n", nodes, graph.channel_count());

    println!("random fraction  success_rate");
    for fraction in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
        println!("{fraction:<16} {:.4}", mean_success(&bench, Selection::Random { fraction }, seeds)?);
    }

    println!("\nselection        success_rate");
    let top = mean_success(&bench, Selection::TopBetweenness { fraction: 0.15 }, seeds)?;
    let random = mean_success(&bench, Selection::Random { fraction: 0.15 }, seeds)?;
    println!("top 15%          {top:.4}\nrandom 15%       {random:.4}");

    let width = (0.15 * graph.channel_count() as f64).round() as usize;
    let step = (0.05 * graph.channel_count() as f64).round() as usize;
    println!("\nwindow start rank  success_rate");
    let mut start = 0;
    while start + width <= graph.channel_count() {
        let rate = mean_success(&bench, Selection::Window { start_rank: start, width }, seeds)?;
        println!("{start:<18} {rate:.4}");
        start += step;
    }
    Ok(())
}
