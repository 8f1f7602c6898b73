use std::collections::{BTreeMap, HashSet};

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};

/// A named, date-indexed sequence of values. `None` marks a missing slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    name: String,
    points: Vec<(NaiveDate, Option<f64>)>,
}

impl TimeSeries {
    /// Builds a series, rejecting unsorted or repeated dates and non-finite
    /// values.
    pub fn new(name: impl Into<String>, points: Vec<(NaiveDate, Option<f64>)>) -> Result<Self> {
        let name = name.into();
        for pair in points.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::InvalidInput(format!(
                    "series `{name}`: dates not strictly increasing at {}",
                    pair[1].0
                )));
            }
        }
        if let Some((date, _)) = points
            .iter()
            .find(|(_, v)| v.is_some_and(|x| !x.is_finite()))
        {
            return Err(Error::InvalidInput(format!(
                "series `{name}`: non-finite value on {date}"
            )));
        }
        Ok(Self { name, points })
    }

    /// Builds a fully defined series from parallel date and value slices.
    pub fn from_values(name: impl Into<String>, dates: &[NaiveDate], values: &[f64]) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        let points = dates.iter().zip(values).map(|(&d, &v)| (d, Some(v))).collect();
        Self::new(name, points)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn points(&self) -> &[(NaiveDate, Option<f64>)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.points.iter().map(|(d, _)| *d)
    }

    pub fn get(&self, date: NaiveDate) -> Option<f64> {
        self.points
            .binary_search_by_key(&date, |(d, _)| *d)
            .ok()
            .and_then(|i| self.points[i].1)
    }

    /// Number of non-missing values.
    pub fn defined_count(&self) -> usize {
        self.points.iter().filter(|(_, v)| v.is_some()).count()
    }

    /// The defined values in date order, dropping missing slots.
    pub fn defined_values(&self) -> Vec<f64> {
        self.points.iter().filter_map(|(_, v)| *v).collect()
    }
}

/// Two or more equal-length, fully defined columns on a shared calendar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignedFrame {
    dates: Vec<NaiveDate>,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl AlignedFrame {
    pub fn new(dates: Vec<NaiveDate>, columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if columns.len() < 2 {
            return Err(Error::InvalidInput(
                "a frame needs at least two columns".into(),
            ));
        }
        let mut seen = HashSet::new();
        for (name, col) in &columns {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate column name `{name}`")));
            }
            if col.len() != dates.len() {
                return Err(Error::InvalidInput(format!(
                    "column `{name}` has {} rows, calendar has {}",
                    col.len(),
                    dates.len()
                )));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("column `{name}` has non-finite values")));
            }
        }
        if dates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("frame dates not strictly increasing".into()));
        }
        let (names, columns) = columns.into_iter().unzip();
        Ok(Self { dates, names, columns })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn rows(&self) -> usize {
        self.dates.len()
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, index: usize) -> &[f64] {
        &self.columns[index]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column_by_name(&self, name: &str) -> Option<&[f64]> {
        self.column_index(name).map(|i| self.column(i))
    }

    /// Value of column `col` at row `row`.
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.columns[col][row]
    }

    /// Columns re-wrapped as fully defined series.
    pub fn to_series(&self) -> Vec<TimeSeries> {
        self.names
            .iter()
            .zip(&self.columns)
            .map(|(name, col)| {
                TimeSeries::from_values(name.clone(), &self.dates, col)
                    .expect("frame columns satisfy series invariants")
            })
            .collect()
    }

    /// A frame with columns reordered by `order` (indices into this frame).
    pub fn select(&self, order: &[usize]) -> Result<Self> {
        let columns = order
            .iter()
            .map(|&i| {
                self.columns
                    .get(i)
                    .map(|c| (self.names[i].clone(), c.clone()))
                    .ok_or_else(|| Error::InvalidInput(format!("no column {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.dates.clone(), columns)
    }
}

/// Keeps exactly the dates on which every series has a value (listwise
/// deletion). Columns follow input order.
pub fn align(series: &[&TimeSeries]) -> Result<AlignedFrame> {
    if series.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "alignment needs at least two series, got {}",
            series.len()
        )));
    }
    let mut table: BTreeMap<NaiveDate, Vec<f64>> = series[0]
        .points()
        .iter()
        .filter_map(|(d, v)| v.map(|x| (*d, vec![x])))
        .collect();
    for s in &series[1..] {
        let values: BTreeMap<NaiveDate, f64> = s
            .points()
            .iter()
            .filter_map(|(d, v)| v.map(|x| (*d, x)))
            .collect();
        table.retain(|d, row| match values.get(d) {
            Some(&x) => {
                row.push(x);
                true
            }
            None => false,
        });
    }
    if table.len() < 2 {
        return Err(Error::InsufficientOverlap { rows: table.len() });
    }
    let dates: Vec<NaiveDate> = table.keys().copied().collect();
    let columns = series
        .iter()
        .enumerate()
        .map(|(j, s)| (s.name().to_string(), table.values().map(|row| row[j]).collect()))
        .collect();
    AlignedFrame::new(dates, columns)
}
