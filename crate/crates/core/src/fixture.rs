//! Deterministic synthetic two-market panel.
//!
//! Index returns are i.i.d. Gaussian. Each stock's daily direction is drawn
//! with an up-probability tilted by the previous day's index return, and
//! advancing stocks trade heavier (decliners lighter) after up days. Lagged
//! returns therefore drive both SENT and ARMS, while sentiment carries no
//! information about future index returns.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use libm::exp;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::json;

use crate::error::{Error, Result};
use crate::simulate::{business_days, rng};

#[derive(Debug, Clone, PartialEq)]
pub struct MarketDesign {
    pub label: &'static str,
    pub ticker_prefix: &'static str,
    pub tickers: usize,
    pub days: usize,
    pub index_start: f64,
    pub return_mean: f64,
    pub return_sd: f64,
    /// Logistic slope of the up-move probability in the standardized lagged
    /// index return.
    pub direction_tilt: f64,
    /// Log-volume shift per standardized lagged return, `+` for advancers.
    pub volume_tilt: f64,
    pub unchanged_prob: f64,
    pub missing_prob: f64,
}

pub const MARKETS: [MarketDesign; 2] = [
    MarketDesign {
        label: "TunisSE",
        ticker_prefix: "TN",
        tickers: 40,
        days: 2500,
        index_start: 3000.0,
        return_mean: 0.0004,
        return_sd: 0.006,
        direction_tilt: 0.12,
        volume_tilt: 0.08,
        unchanged_prob: 0.15,
        missing_prob: 0.01,
    },
    MarketDesign {
        label: "CasaSE",
        ticker_prefix: "MA",
        tickers: 40,
        days: 2500,
        index_start: 9000.0,
        return_mean: 0.0002,
        return_sd: 0.009,
        direction_tilt: 0.08,
        volume_tilt: 0.06,
        unchanged_prob: 0.10,
        missing_prob: 0.02,
    },
];

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Panel and index CSV text for one market.
pub fn market_files(design: &MarketDesign, seed: u64) -> (String, String) {
    let mut rng = rng(seed);
    let start = NaiveDate::from_ymd_opt(2006, 1, 2).expect("valid date");
    let calendar = business_days(start, design.days);

    let mut index = Vec::with_capacity(design.days);
    index.push(design.index_start);
    for _ in 1..design.days {
        let r = design.return_mean + design.return_sd * rng.sample::<f64, _>(StandardNormal);
        let prev = *index.last().expect("non-empty");
        index.push(round2(prev * (1.0 + r)).max(0.01));
    }

    struct Stock {
        name: String,
        listed_from: usize,
        close: f64,
        base_volume: f64,
    }
    let mut stocks: Vec<Stock> = (0..design.tickers)
        .map(|i| {
            let late = rng.random::<f64>() < 0.1;
            Stock {
                name: format!("{}{:02}", design.ticker_prefix, i + 1),
                listed_from: if late { rng.random_range(1..design.days / 4) } else { 0 },
                close: round2(rng.random_range(5.0..150.0)),
                base_volume: exp(7.0 + 1.5 * rng.sample::<f64, _>(StandardNormal)),
            }
        })
        .collect();

    let mut panel = String::from("date,ticker,close,volume\n");
    let mut index_csv = String::from("date,close\n");
    for (t, date) in calendar.iter().enumerate() {
        writeln!(index_csv, "{date},{:.2}", index[t]).unwrap();
        let z = if t >= 2 {
            (index[t - 1] / index[t - 2] - 1.0 - design.return_mean) / design.return_sd
        } else {
            0.0
        };
        let up_prob = 1.0 / (1.0 + exp(-design.direction_tilt * z));
        for stock in &mut stocks {
            // Draws happen for every stock and day so that the stream does
            // not depend on listing or gaps.
            let u_missing = rng.random::<f64>();
            let u_unchanged = rng.random::<f64>();
            let u_up = rng.random::<f64>();
            let magnitude = 0.001 + (0.015 * rng.sample::<f64, _>(StandardNormal)).abs();
            let vol_noise: f64 = rng.sample(StandardNormal);
            if t < stock.listed_from || (t > stock.listed_from && u_missing < design.missing_prob) {
                continue;
            }
            let mut tilt = 0.0;
            if t > stock.listed_from && u_unchanged >= design.unchanged_prob {
                let up = u_up < up_prob;
                let moved = if up {
                    round2(stock.close * (1.0 + magnitude))
                } else {
                    round2(stock.close * (1.0 - magnitude))
                };
                let moved = if moved != stock.close {
                    moved
                } else if up {
                    stock.close + 0.01
                } else {
                    stock.close - 0.01
                };
                if moved >= 0.01 {
                    stock.close = round2(moved);
                    tilt = if up { design.volume_tilt * z } else { -design.volume_tilt * z };
                }
            }
            let volume = (stock.base_volume * exp(0.5 * vol_noise + tilt)).round() as u64;
            writeln!(panel, "{date},{},{:.2},{volume}", stock.name, stock.close).unwrap();
        }
    }
    (panel, index_csv)
}

pub fn fixture_config() -> serde_json::Value {
    let markets: Vec<_> = MARKETS
        .iter()
        .map(|m| {
            json!({
                "label": m.label,
                "panel_path": format!("{}_panel.csv", m.label),
                "index_path": format!("{}_index.csv", m.label),
            })
        })
        .collect();
    json!({
        "markets": markets,
        "lags": [1, 2],
        "p_max_for_aic": 10,
        "run_adf": true,
        "output_dir": "output",
        "formats": ["json", "csv", "markdown"],
    })
}

/// Writes `<label>_panel.csv` and `<label>_index.csv` for both markets plus a
/// `config.json` that runs the pipeline on them.
pub fn generate_fixture(seed: u64, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let mut write = |name: String, text: &str| -> Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    for (i, design) in MARKETS.iter().enumerate() {
        let market_seed = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
        let (panel, index) = market_files(design, market_seed);
        write(format!("{}_panel.csv", design.label), &panel)?;
        write(format!("{}_index.csv", design.label), &index)?;
    }
    let mut config = serde_json::to_string_pretty(&fixture_config()).expect("config serializes");
    config.push('\n');
    write("config.json".into(), &config)?;
    Ok(written)
}
