//! Seeded data generators for Monte-Carlo checks and demos.

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::ingest::AlignedFrame;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The first `n` weekdays starting at `start` (inclusive if a weekday).
pub fn business_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d.checked_add_days(Days::new(1)).expect("date in range");
    }
    out
}

/// Wraps generated columns in a frame on a weekday calendar from 2000-01-03.
pub fn frame_from_columns(columns: Vec<(String, Vec<f64>)>) -> Result<AlignedFrame> {
    let n = columns.first().map_or(0, |c| c.1.len());
    let start = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    AlignedFrame::new(business_days(start, n), columns)
}

/// Gaussian VAR(p): `Y_t = mu + Σ theta[l] Y_{t-l-1} + sd·ε_t`, started at zero
/// and run through `burn_in` discarded steps. Returns `t` rows of length `k`.
pub fn simulate_var<R: Rng>(
    rng: &mut R,
    mu: &[f64],
    theta: &[Vec<Vec<f64>>],
    sd: f64,
    t: usize,
    burn_in: usize,
) -> Vec<Vec<f64>> {
    let k = mu.len();
    let p = theta.len();
    let total = t + burn_in + p;
    let mut y = vec![vec![0.0; k]; total];
    for s in p..total {
        for i in 0..k {
            let mut v = mu[i] + sd * rng.sample::<f64, _>(StandardNormal);
            for (l, lag) in theta.iter().enumerate() {
                for j in 0..k {
                    v += lag[i][j] * y[s - l - 1][j];
                }
            }
            y[s][i] = v;
        }
    }
    y.split_off(burn_in + p)
}

/// Transposes row-major simulation output into named columns.
pub fn columns(rows: &[Vec<f64>], names: &[&str]) -> Vec<(String, Vec<f64>)> {
    names
        .iter()
        .enumerate()
        .map(|(j, n)| (n.to_string(), rows.iter().map(|r| r[j]).collect()))
        .collect()
}

/// i.i.d. standard-normal returns and `sent_t = coupling · r_{t-1} + ε_t`.
/// With `coupling = 0` the two series are independent noise.
pub fn planted_pair<R: Rng>(rng: &mut R, t: usize, coupling: f64) -> (Vec<f64>, Vec<f64>) {
    let r: Vec<f64> = (0..=t).map(|_| rng.sample(StandardNormal)).collect();
    let sent: Vec<f64> = (1..=t)
        .map(|i| coupling * r[i - 1] + rng.sample::<f64, _>(StandardNormal))
        .collect();
    (r[1..].to_vec(), sent)
}
