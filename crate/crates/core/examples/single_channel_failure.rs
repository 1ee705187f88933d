//! Failure rate of a lone channel once it has first run dry on one side.
//!
//! ```text
//! cargo run --release --example single_channel_failure
//! ```

use chanlife::simulator::single_channel_experiment;
use chanlife::{rng, stats};

fn main() -> chanlife::Result<()> {
    let omega = 60_000;
    println!("p     2w      20w     40w");
    for p in [0.5, 0.6, 0.7, 0.8, 0.9] {
        let mut line = format!("{p:<5}");
        for units in [2, 20, 40] {
            let rates: Vec<f64> = (0..20)
                .map(|s| single_channel_experiment(p, units * omega, omega, 5_000, rng::derive(3, s)))
                .filter_map(Result::ok)
                .map(|o| o.failure_rate)
                .collect();
            line.push_str(&format!(" {:<7.3}", stats::summarize(&rates).unwrap().mean));
        }
        println!("{line}");
    }
    Ok(())
}
