//! Expected lifespan of a single channel from its funds and traffic.
//!
//! ```text
//! cargo run --example predict_lifespan
//! ```

use chanlife::lifespan::{self, ChannelSpec};

fn main() -> chanlife::Result<()> {
    // 1.2 Msat on each side, 60 ksat payments: 20 payments of headroom each way
    let walk = lifespan::discretize_funds(&ChannelSpec::new(1_200_000, 1_200_000, 60_000))?;
    println!("boundaries a={} b={}", walk.a(), walk.b());

    for (ab, ba) in [(1.0, 1.0), (1.5, 1.0), (3.0, 1.0)] {
        let p = lifespan::direction_probability(ab, ba)?;
        let est = lifespan::estimate(&walk.with_p(p)?, Some((ab, ba)))?;
        println!(
            "rates {ab}/{ba} per day -> p = {p:.3}, {:.1} payments, {:.1} days",
            est.expected_payments,
            est.expected_days.unwrap()
        );
    }

    // a channel that has already drifted five payments toward A's edge
    let shifted = walk.starting_at(5)?;
    println!("from x=5: {:.1} payments", lifespan::expected_steps_from(&shifted)?);
    Ok(())
}
