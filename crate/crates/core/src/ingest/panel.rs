use std::collections::HashSet;
use std::io::Read;

use chrono::NaiveDate;
use serde::Serialize;

use super::series::TimeSeries;
use crate::error::{Error, Result};

const PANEL_HEADER: [&str; 4] = ["date", "ticker", "close", "volume"];
const INDEX_HEADER: [&str; 2] = ["date", "close"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceBar {
    pub ticker: String,
    pub date: NaiveDate,
    pub close: f64,
    pub volume: u64,
}

/// Daily close/volume observations for one market.
///
/// Bars are kept sorted by `(date, ticker)`; `calendar` holds the distinct
/// dates in increasing order and `offsets[i]..offsets[i + 1]` is the bar
/// range for `calendar[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    market: String,
    bars: Vec<PriceBar>,
    calendar: Vec<NaiveDate>,
    offsets: Vec<usize>,
}

impl PricePanel {
    pub fn new(market: impl Into<String>, mut bars: Vec<PriceBar>) -> Result<Self> {
        for bar in &bars {
            if !(bar.close.is_finite() && bar.close > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{} on {}: close must be positive, got {}",
                    bar.ticker, bar.date, bar.close
                )));
            }
        }
        bars.sort_by(|a, b| (a.date, &a.ticker).cmp(&(b.date, &b.ticker)));
        for pair in bars.windows(2) {
            if pair[0].date == pair[1].date && pair[0].ticker == pair[1].ticker {
                return Err(Error::DuplicateKey {
                    ticker: pair[0].ticker.clone(),
                    date: pair[0].date,
                });
            }
        }
        let mut calendar = Vec::new();
        let mut offsets = Vec::new();
        for (i, bar) in bars.iter().enumerate() {
            if calendar.last() != Some(&bar.date) {
                calendar.push(bar.date);
                offsets.push(i);
            }
        }
        offsets.push(bars.len());
        Ok(Self {
            market: market.into(),
            bars,
            calendar,
            offsets,
        })
    }

    pub fn market(&self) -> &str {
        &self.market
    }

    pub fn bars(&self) -> &[PriceBar] {
        &self.bars
    }

    pub fn calendar(&self) -> &[NaiveDate] {
        &self.calendar
    }

    /// Bars on the `i`-th calendar date, sorted by ticker.
    pub fn bars_on(&self, i: usize) -> &[PriceBar] {
        &self.bars[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn tickers(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.bars.iter().map(|b| b.ticker.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        names
    }
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn read_record<R: Read>(
    reader: &mut csv::Reader<R>,
    record: &mut csv::StringRecord,
) -> Result<Option<u64>> {
    match reader.read_record(record) {
        Ok(true) => Ok(Some(record.position().map_or(0, |p| p.line()))),
        Ok(false) => Ok(None),
        Err(e) => {
            let line = e.position().map_or(0, |p| p.line());
            Err(parse_err(line, e.to_string()))
        }
    }
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let mut record = csv::StringRecord::new();
    let Some(line) = read_record(reader, &mut record)? else {
        return Err(parse_err(1, format!("missing header `{}`", expected.join(","))));
    };
    let found: Vec<&str> = record
        .iter()
        .enumerate()
        .map(|(i, f)| if i == 0 { f.trim_start_matches('\u{feff}') } else { f })
        .collect();
    if found != expected {
        return Err(parse_err(
            line,
            format!("expected header `{}`, found `{}`", expected.join(","), found.join(",")),
        ));
    }
    Ok(())
}

fn parse_date(line: u64, field: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(field, "%Y-%m-%d")
        .map_err(|e| parse_err(line, format!("bad date `{field}`: {e}")))
}

fn parse_close(line: u64, field: &str) -> Result<f64> {
    let close: f64 = field
        .parse()
        .map_err(|_| parse_err(line, format!("bad close `{field}`")))?;
    if !close.is_finite() || close <= 0.0 {
        return Err(parse_err(line, format!("close must be positive, got `{field}`")));
    }
    Ok(close)
}

fn parse_volume(line: u64, field: &str) -> Result<u64> {
    if let Some(rest) = field.strip_prefix('-') {
        if rest.parse::<u64>().is_ok_and(|v| v > 0) {
            return Err(parse_err(line, format!("negative volume `{field}`")));
        }
    }
    field
        .parse()
        .map_err(|_| parse_err(line, format!("bad volume `{field}`")))
}

/// Parses a `date,ticker,close,volume` panel.
pub fn parse_price_csv<R: Read>(input: R, market: &str) -> Result<PricePanel> {
    let mut reader = csv_reader(input);
    check_header(&mut reader, &PANEL_HEADER)?;
    let mut record = csv::StringRecord::new();
    let mut bars = Vec::new();
    let mut seen = HashSet::new();
    while let Some(line) = read_record(&mut reader, &mut record)? {
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != PANEL_HEADER.len() {
            return Err(parse_err(
                line,
                format!("expected 4 fields, found {}", record.len()),
            ));
        }
        let date = parse_date(line, &record[0])?;
        let ticker = &record[1];
        if ticker.is_empty() {
            return Err(parse_err(line, "empty ticker"));
        }
        let close = parse_close(line, &record[2])?;
        let volume = parse_volume(line, &record[3])?;
        if !seen.insert((ticker.to_string(), date)) {
            return Err(Error::DuplicateKey {
                ticker: ticker.to_string(),
                date,
            });
        }
        bars.push(PriceBar {
            ticker: ticker.to_string(),
            date,
            close,
            volume,
        });
    }
    PricePanel::new(market, bars)
}

/// Parses a `date,close` index file into a close-price series.
pub fn parse_index_csv<R: Read>(input: R, name: &str) -> Result<TimeSeries> {
    let mut reader = csv_reader(input);
    check_header(&mut reader, &INDEX_HEADER)?;
    let mut record = csv::StringRecord::new();
    let mut points = Vec::new();
    while let Some(line) = read_record(&mut reader, &mut record)? {
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != INDEX_HEADER.len() {
            return Err(parse_err(
                line,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        let date = parse_date(line, &record[0])?;
        let close = parse_close(line, &record[1])?;
        points.push((date, Some(close)));
    }
    points.sort_by_key(|(d, _)| *d);
    if let Some(pair) = points.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateKey {
            ticker: name.to_string(),
            date: pair[0].0,
        });
    }
    TimeSeries::new(name, points)
}
