//! Single-channel lifespan model.
//!
//! A channel's balance is a one-dimensional random walk: every payment is a
//! unit step (one payment size ω), towards `+a` when the A side pays and
//! towards `-b` when the B side pays. The channel is unbalanced once the walk
//! hits either boundary. The expected hitting time is the expected number of
//! payments the channel survives; dividing by the total payment rate turns it
//! into days.

use std::collections::BTreeMap;

use rand::distr::{Bernoulli, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Below this distance from 1/2 the driftless closed form is used.
pub const BALANCED_P_TOLERANCE: f64 = 1e-9;

/// Funds committed to a channel and the constant payment size, in satoshi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub fund_a: u64,
    pub fund_b: u64,
    pub payment_size: u64,
}

impl ChannelSpec {
    pub fn new(fund_a: u64, fund_b: u64, payment_size: u64) -> Self {
        Self {
            fund_a,
            fund_b,
            payment_size,
        }
    }

    pub fn capacity(&self) -> u64 {
        self.fund_a + self.fund_b
    }
}

/// Step probability, absorbing boundaries `+a` / `-b` and start position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkParams {
    p: f64,
    a: u64,
    b: u64,
    x: i64,
}

impl WalkParams {
    pub fn new(p: f64, a: u64, b: u64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid("p", format!("{p} is not in (0, 1)")));
        }
        if a == 0 {
            return Err(Error::invalid("a", "boundary must be at least 1"));
        }
        if b == 0 {
            return Err(Error::invalid("b", "boundary must be at least 1"));
        }
        Ok(Self { p, a, b, x: 0 })
    }

    /// Moves the start of the walk to `x`, which must lie in `[-b, a]`.
    pub fn starting_at(mut self, x: i64) -> Result<Self> {
        if x > self.a as i64 || x < -(self.b as i64) {
            return Err(Error::invalid(
                "x",
                format!("{x} is outside [-{}, {}]", self.b, self.a),
            ));
        }
        self.x = x;
        Ok(self)
    }

    pub fn with_p(self, p: f64) -> Result<Self> {
        WalkParams::new(p, self.a, self.b)?.starting_at(self.x)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn x(&self) -> i64 {
        self.x
    }
}

/// Expected survival of a channel, in payments and (if a rate is known) days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifespanEstimate {
    pub expected_payments: f64,
    pub expected_days: Option<f64>,
}

/// Boundaries `a = floor(F_A/ω)` and `b = floor(F_B/ω)`; `p` is set to 1/2
/// and should be replaced with [`WalkParams::with_p`] once known.
pub fn discretize_funds(channel: &ChannelSpec) -> Result<WalkParams> {
    if channel.payment_size == 0 {
        return Err(Error::invalid("payment_size", "must be positive"));
    }
    let a = channel.fund_a / channel.payment_size;
    let b = channel.fund_b / channel.payment_size;
    if a == 0 || b == 0 {
        return Err(Error::DegenerateChannel {
            fund_a: channel.fund_a,
            fund_b: channel.fund_b,
            payment_size: channel.payment_size,
        });
    }
    WalkParams::new(0.5, a, b)
}

/// Expected number of steps from the origin until the walk first hits `+a`
/// or `-b`.
pub fn expected_steps(params: &WalkParams) -> Result<f64> {
    if params.x != 0 {
        return Err(Error::invalid(
            "x",
            "expected_steps starts at the origin; use expected_steps_from",
        ));
    }
    expected_steps_from(params)
}

/// Expected number of steps from `params.x()` until absorption.
///
/// Satisfies `s(a) = s(-b) = 0`. For `p = 1/2` this is `(a - x)(b + x)`.
pub fn expected_steps_from(params: &WalkParams) -> Result<f64> {
    if (params.p - 0.5).abs() < BALANCED_P_TOLERANCE {
        let up = (params.a as i64 - params.x) as f64;
        let down = (params.b as i64 + params.x) as f64;
        return Ok(up * down);
    }
    drifted_steps_from(params.p, params.a, params.b, params.x)
}

/// The `p != 1/2` closed form, evaluated without the balanced-branch switch.
///
/// The walk is relabelled so the dominant step probability is at least 1/2,
/// which keeps `(q/p)^k` in `[0, 1]`; powers are taken through `expm1` so
/// boundaries in the hundreds of thousands neither overflow nor lose the
/// small differences near `p = 1/2`.
pub fn drifted_steps_from(p: f64, a: u64, b: u64, x: i64) -> Result<f64> {
    let (hi, lower, x) = if p >= 0.5 { (p, b, x) } else { (1.0 - p, a, -x) };
    let lo = 1.0 - hi;
    let span = (a + b) as f64;
    // distance of the start from the boundary the drift points away from
    let from_lower = (x + lower as i64) as f64;
    if from_lower <= 0.0 || from_lower >= span {
        return Ok(0.0);
    }
    let log_ratio = ((lo - hi) / hi).ln_1p();
    let hit_share = (from_lower * log_ratio).exp_m1() / (span * log_ratio).exp_m1();
    let steps = (from_lower - span * hit_share) / (lo - hi);
    if steps.is_finite() && steps >= 0.0 {
        Ok(steps)
    } else {
        Err(Error::NonFinite { p, a, b })
    }
}

/// `p = λ(a,b) / (λ(a,b) + λ(b,a))`.
pub fn direction_probability(lambda_ab: f64, lambda_ba: f64) -> Result<f64> {
    check_rate("lambda_ab", lambda_ab)?;
    check_rate("lambda_ba", lambda_ba)?;
    let total = lambda_ab + lambda_ba;
    if total <= 0.0 {
        return Err(Error::DeadChannel);
    }
    Ok(lambda_ab / total)
}

/// Days until imbalance: steps divided by the channel's combined rate.
pub fn expected_lifetime(steps: f64, lambda_ab: f64, lambda_ba: f64) -> Result<f64> {
    if steps.is_nan() || steps < 0.0 {
        return Err(Error::invalid("steps", format!("{steps} is negative")));
    }
    check_rate("lambda_ab", lambda_ab)?;
    check_rate("lambda_ba", lambda_ba)?;
    let total = lambda_ab + lambda_ba;
    if total <= 0.0 {
        return Err(Error::DeadChannel);
    }
    Ok(steps / total)
}

/// Expected payments and, when `rates` is given as `(λ(a,b), λ(b,a))`,
/// expected days.
pub fn estimate(params: &WalkParams, rates: Option<(f64, f64)>) -> Result<LifespanEstimate> {
    let expected_payments = expected_steps_from(params)?;
    let expected_days = rates
        .map(|(ab, ba)| expected_lifetime(expected_payments, ab, ba))
        .transpose()?;
    Ok(LifespanEstimate {
        expected_payments,
        expected_days,
    })
}

fn check_rate(name: &'static str, rate: f64) -> Result<()> {
    if rate.is_finite() && rate >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{rate} is not a non-negative rate")))
    }
}

/// Outcome of a batch of simulated walks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorptionSample {
    pub trials: u64,
    pub mean_steps: f64,
    pub std_error: f64,
    /// Absorption step count -> number of walks.
    pub histogram: BTreeMap<u64, u64>,
}

const WALKS_PER_STREAM: u64 = 4096;

/// Simulates `trials` independent walks from `params.x()` until absorption.
///
/// Walks are grouped into fixed-size blocks, each with its own random
/// stream, so the result depends only on `seed` and not on thread count.
pub fn monte_carlo_absorption(
    params: &WalkParams,
    trials: u64,
    seed: u64,
) -> Result<AbsorptionSample> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let step_up = Bernoulli::new(params.p).map_err(|e| Error::invalid("p", e.to_string()))?;
    let upper = params.a as i64;
    let lower = -(params.b as i64);
    let blocks = trials.div_ceil(WALKS_PER_STREAM);

    let partials: Vec<(u128, u128, BTreeMap<u64, u64>)> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = rng::stream(seed, block);
            let count = WALKS_PER_STREAM.min(trials - block * WALKS_PER_STREAM);
            let mut sum = 0u128;
            let mut sum_sq = 0u128;
            let mut histogram = BTreeMap::new();
            for _ in 0..count {
                let mut position = params.x;
                let mut steps = 0u64;
                while position < upper && position > lower {
                    position += if step_up.sample(&mut rng) { 1 } else { -1 };
                    steps += 1;
                }
                sum += steps as u128;
                sum_sq += (steps as u128) * (steps as u128);
                *histogram.entry(steps).or_insert(0) += 1;
            }
            (sum, sum_sq, histogram)
        })
        .collect();

    let mut sum = 0u128;
    let mut sum_sq = 0u128;
    let mut histogram = BTreeMap::new();
    for (s, s2, h) in partials {
        sum += s;
        sum_sq += s2;
        for (steps, n) in h {
            *histogram.entry(steps).or_insert(0) += n;
        }
    }
    let n = trials as f64;
    let mean = sum as f64 / n;
    let std_error = if trials > 1 {
        let var = (sum_sq as f64 - n * mean * mean) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(AbsorptionSample {
        trials,
        mean_steps: mean,
        std_error,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk(p: f64, a: u64, b: u64) -> WalkParams {
        WalkParams::new(p, a, b).unwrap()
    }

    /// Solves `s_x = 1 + q s_{x-1} + p s_{x+1}`, `s_a = s_{-b} = 0` with the
    /// Thomas algorithm. Index `i` holds `x = i - b`.
    fn recurrence_oracle(p: f64, a: u64, b: u64) -> Vec<f64> {
        let n = (a + b + 1) as usize;
        let q = 1.0 - p;
        // interior rows: -q s_{i-1} + s_i - p s_{i+1} = 1
        let m = n - 2;
        if m == 0 {
            return vec![0.0; n];
        }
        let mut c_prime = vec![0.0; m];
        let mut d_prime = vec![0.0; m];
        c_prime[0] = -p;
        d_prime[0] = 1.0;
        for i in 1..m {
            let denom = 1.0 - (-q) * c_prime[i - 1];
            c_prime[i] = -p / denom;
            d_prime[i] = (1.0 - (-q) * d_prime[i - 1]) / denom;
        }
        let mut interior = vec![0.0; m];
        interior[m - 1] = d_prime[m - 1];
        for i in (0..m - 1).rev() {
            interior[i] = d_prime[i] - c_prime[i] * interior[i + 1];
        }
        let mut s = vec![0.0; n];
        s[1..n - 1].copy_from_slice(&interior);
        s
    }

    /// The three-term solution for `p != 1/2` as printed, evaluated naively.
    fn printed_three_term(p: f64, a: u64, b: u64, x: i64) -> f64 {
        let q = 1.0 - p;
        let n = (a + b) as i32;
        let (a_f, b_f) = (a as f64, b as f64);
        let pn = p.powi(n);
        let qn = q.powi(n);
        (a_f * pn + b_f * qn) / ((2.0 * p - 1.0) * (pn - qn))
            + x as f64 / (1.0 - 2.0 * p)
            + ((a_f + b_f) * p.powi(a as i32) * q.powi(b as i32))
                / ((2.0 * p - 1.0) * (qn - pn))
                * (q / p).powi(x as i32)
    }

    #[test]
    fn discretize_examples() {
        let w = discretize_funds(&ChannelSpec::new(1_200_000, 1_200_000, 60_000)).unwrap();
        assert_eq!((w.a(), w.b(), w.x()), (20, 20, 0));
        let w = discretize_funds(&ChannelSpec::new(60_000, 60_000, 60_000)).unwrap();
        assert_eq!((w.a(), w.b()), (1, 1));
        let w = discretize_funds(&ChannelSpec::new(150_000, 90_000, 60_000)).unwrap();
        assert_eq!((w.a(), w.b()), (2, 1));
    }

    #[test]
    fn discretize_rejects_degenerate() {
        let err = discretize_funds(&ChannelSpec::new(59_999, 1_000_000, 60_000)).unwrap_err();
        assert!(matches!(err, Error::DegenerateChannel { .. }));
        assert!(discretize_funds(&ChannelSpec::new(1, 1, 0)).is_err());
    }

    #[test]
    fn balanced_walk_is_product_of_boundaries() {
        assert_eq!(expected_steps(&walk(0.5, 20, 20)).unwrap(), 400.0);
        assert_eq!(expected_steps(&walk(0.5, 1, 1)).unwrap(), 1.0);
    }

    #[test]
    fn biased_example_matches_hand_evaluation() {
        // a p^a (p^b - q^b) + b q^b (q^a - p^a) over (p - q)(p^{a+b} - q^{a+b})
        let (p, q) = (0.6f64, 0.4f64);
        let hand = (2.0 * p.powi(2) * (p.powi(2) - q.powi(2))
            + 2.0 * q.powi(2) * (q.powi(2) - p.powi(2)))
            / ((p - q) * (p.powi(4) - q.powi(4)));
        let got = expected_steps(&walk(0.6, 2, 2)).unwrap();
        assert!((got - hand).abs() < 1e-12);
        assert!((got - 3.846_153_846_153_846).abs() < 1e-12);
    }

    #[test]
    fn biased_example_matches_monte_carlo() {
        let params = walk(0.6, 2, 2);
        let mc = monte_carlo_absorption(&params, 1_000_000, 11).unwrap();
        let exact = expected_steps(&params).unwrap();
        assert!((mc.mean_steps - exact).abs() <= 3.0 * mc.std_error);
    }

    #[test]
    fn start_position_examples() {
        // (a - x)(b + x) = 2 * 4
        let w = walk(0.5, 3, 3).starting_at(1).unwrap();
        assert_eq!(expected_steps_from(&w).unwrap(), 8.0);
        assert_eq!(recurrence_oracle(0.5, 3, 3)[4], 8.0);

        let at_boundary = walk(0.7, 5, 5).starting_at(5).unwrap();
        assert_eq!(expected_steps_from(&at_boundary).unwrap(), 0.0);

        let origin = walk(0.7, 5, 5);
        assert_eq!(
            expected_steps_from(&origin).unwrap(),
            expected_steps(&origin).unwrap()
        );
    }

    #[test]
    fn start_outside_boundaries_rejected() {
        assert!(walk(0.5, 3, 3).starting_at(4).is_err());
        assert!(walk(0.5, 3, 3).starting_at(-4).is_err());
        assert!(expected_steps(&walk(0.5, 3, 3).starting_at(1).unwrap()).is_err());
    }

    #[test]
    fn invalid_probability_rejected() {
        for p in [0.0, 1.0, -0.1, 1.1, f64::NAN] {
            assert!(WalkParams::new(p, 2, 2).is_err(), "p={p}");
        }
    }

    #[test]
    fn matches_recurrence_oracle_on_grid() {
        for pi in 1..=9 {
            let p = pi as f64 / 10.0;
            for a in 1..=10 {
                for b in 1..=10 {
                    let oracle = recurrence_oracle(p, a, b);
                    for (i, expected) in oracle.iter().enumerate() {
                        let x = i as i64 - b as i64;
                        let w = walk(p, a, b).starting_at(x).unwrap();
                        let got = expected_steps_from(&w).unwrap();
                        let tol = 1e-8 * expected.abs().max(1e-300);
                        assert!(
                            (got - expected).abs() <= tol,
                            "p={p} a={a} b={b} x={x}: {got} vs {expected}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn printed_three_term_form_agrees_when_well_conditioned() {
        for &(p, a, b) in &[(0.3, 4u64, 6u64), (0.8, 5, 3), (0.65, 7, 7)] {
            for x in -(b as i64)..=(a as i64) {
                let w = walk(p, a, b).starting_at(x).unwrap();
                let got = expected_steps_from(&w).unwrap();
                let printed = printed_three_term(p, a, b, x);
                assert!((got - printed).abs() < 1e-9 * printed.abs().max(1.0));
            }
        }
    }

    #[test]
    fn continuous_across_balanced_branch() {
        for a in 1..=10 {
            for b in 1..=10 {
                let exact = (a * b) as f64;
                for p in [0.5 + 1e-9, 0.5 - 1e-9] {
                    let v = drifted_steps_from(p, a, b, 0).unwrap();
                    assert!((v - exact).abs() <= 1e-4 * exact, "a={a} b={b}: {v}");
                }
            }
        }
    }

    #[test]
    fn snapshot_scale_boundaries_stay_finite() {
        for p in [0.3, 0.499, 0.501, 0.9] {
            let v = expected_steps(&walk(p, 50_000, 80_000)).unwrap();
            assert!(v.is_finite() && v > 0.0);
        }
        // strong drift: about a / (p - q) steps
        let v = expected_steps(&walk(0.75, 400, 400)).unwrap();
        assert!((v - 800.0).abs() < 1e-6);
    }

    #[test]
    fn direction_probability_examples() {
        assert!((direction_probability(2.0, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(direction_probability(5.0, 5.0).unwrap(), 0.5);
        assert!((direction_probability(0.0044, 0.0022).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            direction_probability(0.0, 0.0),
            Err(Error::DeadChannel)
        ));
        assert!(direction_probability(-1.0, 2.0).is_err());
    }

    #[test]
    fn lifetime_examples() {
        let days = expected_lifetime(400.0, 0.0022, 0.0022).unwrap();
        assert!((days - 90_909.090_909_090_9).abs() < 1e-6);
        assert_eq!(expected_lifetime(0.0, 1.0, 3.0).unwrap(), 0.0);
        assert_eq!(expected_lifetime(10.0, 1.0, 1.0).unwrap(), 5.0);
        assert!(matches!(
            expected_lifetime(10.0, 0.0, 0.0),
            Err(Error::DeadChannel)
        ));
    }

    #[test]
    fn estimate_reports_days_only_with_rates() {
        let w = walk(0.5, 20, 20);
        let bare = estimate(&w, None).unwrap();
        assert_eq!(bare.expected_payments, 400.0);
        assert_eq!(bare.expected_days, None);
        let timed = estimate(&w, Some((1.0, 1.0))).unwrap();
        assert_eq!(timed.expected_days, Some(200.0));
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let w = walk(0.45, 6, 4);
        let first = monte_carlo_absorption(&w, 10_000, 5).unwrap();
        let second = monte_carlo_absorption(&w, 10_000, 5).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.histogram.values().sum::<u64>(), 10_000);
        assert!(monte_carlo_absorption(&w, 0, 5).is_err());
    }

    #[test]
    fn monte_carlo_from_offset_start() {
        let w = walk(0.55, 6, 4).starting_at(-2).unwrap();
        let mc = monte_carlo_absorption(&w, 200_000, 9).unwrap();
        let exact = expected_steps_from(&w).unwrap();
        assert!((mc.mean_steps - exact).abs() <= 4.0 * mc.std_error);
    }
}
