//! Expected single-channel lifespan along one parameter at a time.
//!
//! Funds are in payment units. `p` is the probability that the next payment
//! leaves side A, so side A is "own" and side B is "peer".

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lifespan::{expected_steps, WalkParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    #[serde(rename = "fund_a_payments")]
    pub fund_a: u64,
    #[serde(rename = "fund_b_payments")]
    pub fund_b: u64,
    #[serde(rename = "capacity_payments")]
    pub capacity: u64,
    pub expected_payments: f64,
}

fn row(p: f64, fund_a: u64, fund_b: u64) -> Result<SweepRow> {
    Ok(SweepRow {
        p,
        fund_a,
        fund_b,
        capacity: fund_a + fund_b,
        expected_payments: expected_steps(&WalkParams::new(p, fund_a, fund_b)?)?,
    })
}

/// Capacity split evenly, the odd unit going to side B.
fn balanced(capacity: u64) -> Result<(u64, u64)> {
    if capacity < 2 {
        return Err(Error::invalid("capacity", "a balanced channel needs at least 2 payments"));
    }
    Ok((capacity / 2, capacity - capacity / 2))
}

/// `step, 2*step, ...` strictly inside `(0, 1)`.
pub fn p_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < 0.5) {
        return Err(Error::invalid("step", format!("{step} is not in (0, 0.5)")));
    }
    let n = (1.0 / step).round() as usize;
    Ok((1..n).map(|i| i as f64 * step).filter(|&p| p < 1.0).collect())
}

/// Lifespan against `p` for each balanced capacity.
pub fn p_sweep(capacities: &[u64], ps: &[f64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(capacities.len() * ps.len());
    for &c in capacities {
        let (a, b) = balanced(c)?;
        for &p in ps {
            rows.push(row(p, a, b)?);
        }
    }
    Ok(rows)
}

/// Lifespan against balanced capacity for each `p`.
pub fn capacity_sweep(ps: &[f64], capacities: &[u64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(capacities.len() * ps.len());
    for &p in ps {
        for &c in capacities {
            let (a, b) = balanced(c)?;
            rows.push(row(p, a, b)?);
        }
    }
    Ok(rows)
}

/// Lifespan against own fund, peer fund fixed, for each `p`.
pub fn own_fund_sweep(peer_fund: u64, own_funds: &[u64], ps: &[f64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(own_funds.len() * ps.len());
    for &p in ps {
        for &a in own_funds {
            rows.push(row(p, a, peer_fund)?);
        }
    }
    Ok(rows)
}

/// For each peer fund, the `p` in `ps` giving the longest lifespan with own
/// fund fixed.
pub fn peer_fund_sweep(own_fund: u64, peer_funds: &[u64], ps: &[f64]) -> Result<Vec<SweepRow>> {
    if ps.is_empty() {
        return Err(Error::invalid("ps", "empty p grid"));
    }
    peer_funds
        .iter()
        .map(|&b| {
            let mut best: Option<SweepRow> = None;
            for &p in ps {
                let r = row(p, own_fund, b)?;
                if best.is_none_or(|x| r.expected_payments > x.expected_payments) {
                    best = Some(r);
                }
            }
            Ok(best.expect("non-empty grid"))
        })
        .collect()
}

/// Index of the longest lifespan; first one on ties.
pub fn argmax(rows: &[SweepRow]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, r) in rows.iter().enumerate() {
        if best.is_none_or(|b| r.expected_payments > rows[b].expected_payments) {
            best = Some(i);
        }
    }
    best
}

pub fn write_rows<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in rows {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}
