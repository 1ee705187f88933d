//! Routes a Poisson payment stream through a network and compares each
//! channel's first imbalance with its predicted lifespan.
//!
//! ```text
//! cargo run --release --example simulate_network
//! ```

use chanlife::evaluation::predict_all_lifespans;
use chanlife::simulator::run_simulation;
use chanlife::traffic::{self, FundPolicy, MRatesConfig};

fn main() -> chanlife::Result<()> {
    let omega = traffic::DEFAULT_PAYMENT_SIZE;
    let graph = traffic::random_network(30, 0.2, FundPolicy::default(), 8)?;
    let rates = traffic::generate_mrates(&MRatesConfig {
        n: 30,
        sparse_coefficient: 0.0,
        skew: 1.0,
        base_rate: 1.0,
        seed: 9,
    })?;
    let events = traffic::generate_payment_stream(&rates, 200.0, omega, 10)?;
    let result = run_simulation(&graph, &events, omega, 11)?;
    let predictions = predict_all_lifespans(&graph, &rates, omega)?;

    let summary = result.summary();
    println!(
        "{} payments, success rate {:.3}, {} of {} channels unbalanced\n",
        summary.network_attempts,
        summary.success_rate.unwrap_or(0.0),
        summary.unbalanced_channels,
        summary.channels
    );
    println!("channel  predicted_payments  observed_payments  predicted_days  observed_days");
    for (pred, state) in predictions.iter().zip(&result.channels).take(12) {
        println!(
            "{:<8} {:<19.1} {:<18} {:<15.1} {}",
            pred.channel,
            pred.expected_payments().unwrap_or(f64::NAN),
            state.first_unbalance_step.map_or("-".into(), |s| s.to_string()),
            pred.expected_days().unwrap_or(f64::NAN),
            state.first_unbalance_time.map_or("-".into(), |t| format!("{t:.1}")),
        );
    }
    Ok(())
}
