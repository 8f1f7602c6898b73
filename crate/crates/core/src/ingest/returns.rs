use std::collections::HashMap;

use super::panel::PricePanel;
use super::series::TimeSeries;
use crate::error::{Error, Result};

/// Market return series `r_t = P_t / P_{t-1} - 1` on the panel calendar.
///
/// With an index series, `P` is the index close on consecutive calendar
/// dates. Without one, each date carries the equal-weighted mean of the
/// simple returns of tickers priced on both that date and the previous one.
/// The first calendar date is always missing.
pub fn market_return_series(panel: &PricePanel, index: Option<&TimeSeries>) -> Result<TimeSeries> {
    let calendar = panel.calendar();
    if calendar.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "market {} has {} calendar dates, need at least 2",
            panel.market(),
            calendar.len()
        )));
    }
    let name = "RT";
    let mut points = Vec::with_capacity(calendar.len());
    points.push((calendar[0], None));
    match index {
        Some(index) => {
            if let Some(extra) = index.dates().find(|d| calendar.binary_search(d).is_err()) {
                return Err(Error::InvalidInput(format!(
                    "index date {extra} is not in the {} calendar",
                    panel.market()
                )));
            }
            if index.defined_count() < 2 {
                return Err(Error::InsufficientData(format!(
                    "index series `{}` has fewer than 2 closes",
                    index.name()
                )));
            }
            for pair in calendar.windows(2) {
                let value = match (index.get(pair[0]), index.get(pair[1])) {
                    (Some(prev), Some(cur)) => Some(cur / prev - 1.0),
                    _ => None,
                };
                points.push((pair[1], value));
            }
        }
        None => {
            for i in 1..calendar.len() {
                let prev: HashMap<&str, f64> = panel
                    .bars_on(i - 1)
                    .iter()
                    .map(|b| (b.ticker.as_str(), b.close))
                    .collect();
                let (sum, n) = panel
                    .bars_on(i)
                    .iter()
                    .filter_map(|b| prev.get(b.ticker.as_str()).map(|p| b.close / p - 1.0))
                    .fold((0.0, 0usize), |(s, n), r| (s + r, n + 1));
                points.push((calendar[i], (n > 0).then(|| sum / n as f64)));
            }
        }
    }
    TimeSeries::new(name, points)
}

#[cfg(test)]
mod tests {
    use chrono::NaiveDate;

    use super::*;
    use crate::ingest::PriceBar;

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2010, 1, day).unwrap()
    }

    fn bar(ticker: &str, day: u32, close: f64) -> PriceBar {
        PriceBar {
            ticker: ticker.into(),
            date: d(day),
            close,
            volume: 10,
        }
    }

    fn panel() -> PricePanel {
        PricePanel::new(
            "m",
            vec![
                bar("A", 4, 50.0),
                bar("B", 4, 25.0),
                bar("A", 5, 51.0),
                bar("B", 5, 24.0),
                bar("C", 5, 3.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn index_mode() {
        let index = TimeSeries::from_values("idx", &[d(4), d(5)], &[100.0, 110.0]).unwrap();
        let r = market_return_series(&panel(), Some(&index)).unwrap();
        assert_eq!(r.points()[0].1, None);
        assert!((r.points()[1].1.unwrap() - 0.10).abs() < 1e-15);

        let flat = TimeSeries::from_values("idx", &[d(4), d(5)], &[100.0, 100.0]).unwrap();
        let r = market_return_series(&panel(), Some(&flat)).unwrap();
        assert_eq!(r.points()[1].1, Some(0.0));
    }

    #[test]
    fn equal_weighted_mode() {
        // A: +2%, B: -4%, C has no prior close.
        let r = market_return_series(&panel(), None).unwrap();
        assert!((r.points()[1].1.unwrap() - -0.01).abs() < 1e-15);
    }

    #[test]
    fn index_outside_calendar_rejected() {
        let index = TimeSeries::from_values("idx", &[d(4), d(6)], &[100.0, 110.0]).unwrap();
        assert!(market_return_series(&panel(), Some(&index)).is_err());
    }

    #[test]
    fn needs_two_dates() {
        let p = PricePanel::new("m", vec![bar("A", 4, 1.0)]).unwrap();
        assert!(matches!(
            market_return_series(&p, None),
            Err(Error::InsufficientData(_))
        ));
    }
}
