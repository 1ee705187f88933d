//! Closed-form expected absorption time against simulated walks.
//!
//! ```text
//! cargo run --release --example random_walk_validation -- [trials]
//! ```

use chanlife::lifespan::{expected_steps, monte_carlo_absorption, WalkParams};

fn main() -> chanlife::Result<()> {
    let trials = std::env::args().nth(1).map_or(100_000, |s| s.parse().expect("trials"));
    println!("p    a   b   closed_form   simulated   z");
    for p in [0.3, 0.5, 0.7] {
        for (a, b) in [(2, 2), (5, 10), (20, 20)] {
            let walk = WalkParams::new(p, a, b)?;
            let exact = expected_steps(&walk)?;
            let sample = monte_carlo_absorption(&walk, trials, 42)?;
            let z = (sample.mean_steps - exact) / sample.std_error;
            println!("{p:<4} {a:<3} {b:<3} {exact:<13.4} {:<11.4} {z:+.2}", sample.mean_steps);
        }
    }
    Ok(())
}
