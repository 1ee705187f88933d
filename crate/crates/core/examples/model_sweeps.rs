//! How expected lifespan responds to traffic direction, capacity and the
//! funds each side commits.
//!
//! ```text
//! cargo run --example model_sweeps
//! ```

use chanlife::sweep;

fn main() -> chanlife::Result<()> {
    let grid = sweep::p_grid(0.01)?;

    println!("best p per balanced capacity (payments)");
    for c in [20, 40, 80] {
        let rows = sweep::p_sweep(&[c], &grid)?;
        let best = rows[sweep::argmax(&rows).unwrap()];
        println!("  C={c:<3} p*={:.2} lifespan {:.0}", best.p, best.expected_payments);
    }

    println!("\nlifespan against capacity at p = 0.5");
    for row in sweep::capacity_sweep(&[0.5], &[10, 20, 40, 80])? {
        println!("  C={:<3} {:.0}", row.capacity, row.expected_payments);
    }

    println!("\nown fund against fixed peer fund 20");
    for p in [0.3, 0.5, 0.7] {
        let rows = sweep::own_fund_sweep(20, &[10, 20, 40, 80, 160], &[p])?;
        let line: Vec<String> = rows.iter().map(|r| format!("{:.0}", r.expected_payments)).collect();
        println!("  p={p}: {}", line.join(" "));
    }

    println!("\nbest lifespan against peer fund, own fund 20");
    for row in sweep::peer_fund_sweep(20, &[5, 10, 20, 40, 80], &grid)? {
        println!("  peer={:<3} p*={:.2} {:.0}", row.fund_b, row.p, row.expected_payments);
    }
    Ok(())
}
