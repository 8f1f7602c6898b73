//! Daily advance/decline breadth and the SENT and ARMS sentiment series.
//!
//! A ticker advances when its close rises against the previous calendar
//! date and declines when it falls. Tickers without a close on both dates
//! are ignored. Days on which a ratio is undefined (no decliners, or a zero
//! volume side for ARMS) become missing values, which alignment later drops.

use std::collections::HashMap;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{PricePanel, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BreadthRecord {
    pub date: NaiveDate,
    pub adv: u32,
    pub dec: u32,
    pub adv_vol: u64,
    pub dec_vol: u64,
    pub unchanged: u32,
}

/// One record per calendar date after the first.
pub fn daily_breadth(panel: &PricePanel) -> Result<Vec<BreadthRecord>> {
    let calendar = panel.calendar();
    if calendar.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "breadth needs at least 2 calendar dates, market {} has {}",
            panel.market(),
            calendar.len()
        )));
    }
    let mut records = Vec::with_capacity(calendar.len() - 1);
    for i in 1..calendar.len() {
        let prev: HashMap<&str, f64> = panel
            .bars_on(i - 1)
            .iter()
            .map(|b| (b.ticker.as_str(), b.close))
            .collect();
        let mut rec = BreadthRecord {
            date: calendar[i],
            adv: 0,
            dec: 0,
            adv_vol: 0,
            dec_vol: 0,
            unchanged: 0,
        };
        for bar in panel.bars_on(i) {
            let Some(&before) = prev.get(bar.ticker.as_str()) else {
                continue;
            };
            if bar.close > before {
                rec.adv += 1;
                rec.adv_vol += bar.volume;
            } else if bar.close < before {
                rec.dec += 1;
                rec.dec_vol += bar.volume;
            } else {
                rec.unchanged += 1;
            }
        }
        records.push(rec);
    }
    Ok(records)
}

fn ratio_series(
    name: &str,
    records: &[BreadthRecord],
    value: impl Fn(&BreadthRecord) -> Option<f64>,
) -> TimeSeries {
    let points = records.iter().map(|r| (r.date, value(r))).collect();
    TimeSeries::new(name, points).expect("breadth records are date-sorted with finite ratios")
}

/// `ADV / DEC`; missing when there are no decliners.
pub fn sent_series(records: &[BreadthRecord]) -> TimeSeries {
    ratio_series("SENT", records, |r| {
        (r.dec > 0).then(|| f64::from(r.adv) / f64::from(r.dec))
    })
}

/// `(ADV / ADV_vol) / (DEC / DEC_vol)`; missing when any of the four inputs
/// is zero.
pub fn arms_series(records: &[BreadthRecord]) -> TimeSeries {
    ratio_series("ARMS", records, |r| {
        if r.adv == 0 || r.dec == 0 || r.adv_vol == 0 || r.dec_vol == 0 {
            return None;
        }
        let up = f64::from(r.adv) / r.adv_vol as f64;
        let down = f64::from(r.dec) / r.dec_vol as f64;
        Some(up / down)
    })
}

/// First difference `s_t - s_{t-1}`, missing unless both values exist.
/// The result is named `Δ<name>`.
pub fn diff_series(s: &TimeSeries) -> Result<TimeSeries> {
    let points = s.points();
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "differencing `{}` needs at least 2 points, got {}",
            s.name(),
            points.len()
        )));
    }
    let mut out = Vec::with_capacity(points.len());
    out.push((points[0].0, None));
    for pair in points.windows(2) {
        let value = match (pair[0].1, pair[1].1) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        };
        out.push((pair[1].0, value));
    }
    TimeSeries::new(format!("Δ{}", s.name()), out)
}
