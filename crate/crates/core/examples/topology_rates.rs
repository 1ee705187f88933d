//! Per-channel payment rates and direction probabilities derived from the
//! network topology and a rates matrix.
//!
//! ```text
//! cargo run --example topology_rates
//! ```

use chanlife::network::{
    channel_rates, edge_payment_rates, undirected_channel_betweenness, verify_symmetric_rates,
    PaymentGraph, RatesMatrix,
};

fn main() -> chanlife::Result<()> {
    // A - B - C - D with a shortcut B - D
    let mut g = PaymentGraph::with_labels(["A", "B", "C", "D"].map(String::from).to_vec());
    for (u, v) in [(0, 1), (1, 2), (2, 3), (1, 3)] {
        g.add_channel(u, v, 1_200_000, 1_200_000)?;
    }
    let ebc = undirected_channel_betweenness(&g);

    let mut rates = RatesMatrix::uniform(4, 0.5)?;
    rates.set(0, 3, 2.0)?; // A pays D four times as often as anyone else
    let lambda = edge_payment_rates(&g, &rates)?;

    println!("channel  ebc   rate_ab  rate_ba  p");
    for (id, c) in g.channels().iter().enumerate() {
        let (ab, ba) = channel_rates(&lambda, id);
        println!(
            "{}-{}      {:<5} {ab:<8.3} {ba:<8.3} {:.3}",
            g.label(c.node_a),
            g.label(c.node_b),
            ebc[id],
            ab / (ab + ba)
        );
    }

    // symmetric traffic balances every channel
    let report = verify_symmetric_rates(&g, &RatesMatrix::uniform(4, 0.5)?)?;
    println!("symmetric rates: max relative imbalance {:e}", report.max_deviation);
    Ok(())
}
