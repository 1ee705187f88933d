//! Predicted against simulated lifespans on a random 50-node network.
//!
//! ```text
//! cargo run --release --example evaluate_model -- [iterations] [seed]
//! ```

use std::time::Instant;

use chanlife::evaluation::{evaluate, EvaluationConfig};

fn main() -> chanlife::Result<()> {
    let mut args = std::env::args().skip(1);
    let iterations = args.next().map_or(100, |s| s.parse().expect("iterations"));
    let seed = args.next().map_or(7, |s| s.parse().expect("seed"));

    println!("sc   sk   mean_rel_error  included  excluded  horizon_days  secs");
    for (sc, sk) in [(0.0, 1.0), (0.3, 6.0), (0.9, 1.0), (0.3, 1.0), (0.0, 10.0)] {
        let start = Instant::now();
        let config = EvaluationConfig {
            iterations,
            ..EvaluationConfig::reference(sc, sk, seed)
        };
        let report = evaluate(&config)?;
        println!(
            "{sc:<4} {sk:<4} {:<15.4} {:<9} {:<9} {:<13.1} {:.1}",
            report.mean_relative_error,
            report.included_count,
            report.excluded_count,
            report.horizon_days,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
