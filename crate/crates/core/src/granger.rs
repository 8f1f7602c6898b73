//! Two-directional Granger-causality F-tests and the experiment matrix over
//! return/sentiment transformations, indicators and lag orders.

use serde::{Serialize, Serializer};

use crate::breadth::diff_series;
use crate::error::{Error, Result};
use crate::ingest::{align, AlignedFrame, TimeSeries};
use crate::stats::{f_sf, ols_fit, DesignMatrix};
use crate::var::{coefficient_table, fit_var, lag_selection, CoefficientTable, LagSelection, MIN_HEADROOM};

/// Unrestricted RSS at or below this fraction of the response's total sum
/// of squares counts as an exact fit.
pub const PERFECT_FIT_TOLERANCE: f64 = 1e-20;

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// F statistic, or a marker for an exact unrestricted fit where the ratio
/// is unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FStat {
    Value(f64),
    PerfectFit,
}

impl FStat {
    pub fn value(self) -> Option<f64> {
        match self {
            FStat::Value(v) => Some(v),
            FStat::PerfectFit => None,
        }
    }
}

impl Serialize for FStat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FStat::Value(v) => s.serialize_f64(*v),
            FStat::PerfectFit => s.serialize_str("perfect_fit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrangerResult {
    pub cause: String,
    pub effect: String,
    pub p: usize,
    pub f_stat: FStat,
    pub p_value: f64,
    pub significant_5pct: bool,
    pub t_eff: usize,
    pub df_num: usize,
    pub df_den: usize,
    pub rss_restricted: f64,
    pub rss_unrestricted: f64,
}

/// Tests whether `p` lags of `cause` improve the regression of `effect` on
/// an intercept and its own `p` lags. Both regressions use the same rows.
pub fn granger_test(frame: &AlignedFrame, cause: &str, effect: &str, p: usize) -> Result<GrangerResult> {
    let missing = |n: &str| Error::InvalidInput(format!("frame has no column `{n}`"));
    let cause_col = frame.column_by_name(cause).ok_or_else(|| missing(cause))?;
    let effect_col = frame.column_by_name(effect).ok_or_else(|| missing(effect))?;
    if cause == effect {
        return Err(Error::InvalidInput("cause and effect must differ".into()));
    }
    if p == 0 {
        return Err(Error::InvalidInput("lag order must be at least 1".into()));
    }
    let need = 2 * p + 2 + MIN_HEADROOM;
    if frame.rows() <= need {
        return Err(Error::InsufficientData(format!(
            "Granger test with {p} lags needs more than {need} rows, frame has {}",
            frame.rows()
        )));
    }

    let t_eff = frame.rows() - p;
    let mut unrestricted = Vec::with_capacity(t_eff * (2 * p + 1));
    let mut restricted = Vec::with_capacity(t_eff * (p + 1));
    let mut y = Vec::with_capacity(t_eff);
    for t in p..frame.rows() {
        y.push(effect_col[t]);
        restricted.push(1.0);
        unrestricted.push(1.0);
        for lag in 1..=p {
            restricted.push(effect_col[t - lag]);
            unrestricted.push(effect_col[t - lag]);
        }
        for lag in 1..=p {
            unrestricted.push(cause_col[t - lag]);
        }
    }
    let mut names: Vec<String> = std::iter::once("C".to_string())
        .chain((1..=p).map(|l| format!("{effect} (-{l})")))
        .collect();
    let xr = DesignMatrix::new(t_eff, p + 1, restricted, names.clone())?;
    names.extend((1..=p).map(|l| format!("{cause} (-{l})")));
    let xu = DesignMatrix::new(t_eff, 2 * p + 1, unrestricted, names)?;

    let fit_r = ols_fit(&xr, &y)?;
    let fit_u = ols_fit(&xu, &y)?;
    debug_assert_eq!(fit_r.residuals.len(), fit_u.residuals.len());

    let mean = y.iter().sum::<f64>() / t_eff as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let exact = |rss: f64| rss <= PERFECT_FIT_TOLERANCE * tss;
    let df_den = fit_u.df_resid;
    let (f_stat, p_value) = if exact(fit_u.rss) {
        if exact(fit_r.rss) {
            // Own lags already explain the effect exactly; the cause adds nothing.
            (FStat::Value(0.0), 1.0)
        } else {
            (FStat::PerfectFit, 0.0)
        }
    } else {
        // RSS_r − RSS_u is the squared norm of the restricted residuals'
        // projection onto the unrestricted design. Summing it directly avoids
        // the cancellation in the difference when F is small.
        let aux = ols_fit(&xu, &fit_r.residuals)?;
        let gain: f64 = (0..t_eff)
            .map(|i| {
                let fitted: f64 = xu.row(i).iter().zip(&aux.coefs).map(|(x, b)| x * b).sum();
                fitted * fitted
            })
            .sum();
        let f = (gain / p as f64) / (fit_u.rss / df_den as f64);
        let f = f.max(0.0);
        (FStat::Value(f), f_sf(f, p, df_den))
    };

    Ok(GrangerResult {
        cause: cause.to_string(),
        effect: effect.to_string(),
        p,
        f_stat,
        p_value,
        significant_5pct: p_value < SIGNIFICANCE_LEVEL,
        t_eff,
        df_num: p,
        df_den,
        rss_restricted: fit_r.rss,
        rss_unrestricted: fit_u.rss,
    })
}

/// Which of the two series enter in first differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Transformation {
    /// `r_t` against `sent_t`.
    Levels,
    /// `r_t` against `Δsent_t`.
    ReturnsSentimentChange,
    /// `Δr_t` against `sent_t`.
    ReturnChangeSentiment,
    /// `Δr_t` against `Δsent_t`.
    BothChanges,
}

impl Transformation {
    pub const ALL: [Transformation; 4] = [
        Transformation::Levels,
        Transformation::ReturnsSentimentChange,
        Transformation::ReturnChangeSentiment,
        Transformation::BothChanges,
    ];

    pub fn differences_returns(self) -> bool {
        matches!(self, Transformation::ReturnChangeSentiment | Transformation::BothChanges)
    }

    pub fn differences_sentiment(self) -> bool {
        matches!(self, Transformation::ReturnsSentimentChange | Transformation::BothChanges)
    }

    pub fn slug(self) -> &'static str {
        match self {
            Transformation::Levels => "rt_sent",
            Transformation::ReturnsSentimentChange => "rt_dsent",
            Transformation::ReturnChangeSentiment => "drt_sent",
            Transformation::BothChanges => "drt_dsent",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Transformation::Levels => "stock return & sentiment",
            Transformation::ReturnsSentimentChange => "stock return & sentiment change",
            Transformation::ReturnChangeSentiment => "stock return change & sentiment",
            Transformation::BothChanges => "stock return change & sentiment change",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Indicator {
    Sent,
    Arms,
}

impl Indicator {
    pub const ALL: [Indicator; 2] = [Indicator::Sent, Indicator::Arms];

    pub fn name(self) -> &'static str {
        match self {
            Indicator::Sent => "SENT",
            Indicator::Arms => "ARMS",
        }
    }
}

/// `Test1`: returns cause sentiment. `Test2`: sentiment causes returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Direction {
    Test1,
    Test2,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::Test1, Direction::Test2];
}

pub const RETURNS_NAME: &str = "RT";

fn series_name(base: &str, differenced: bool) -> String {
    if differenced {
        format!("Δ{base}")
    } else {
        base.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Available(GrangerResult),
    Unavailable { reason: String },
}

impl CellOutcome {
    pub fn result(&self) -> Option<&GrangerResult> {
        match self {
            CellOutcome::Available(r) => Some(r),
            CellOutcome::Unavailable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportCell {
    pub transformation: Transformation,
    pub indicator: Indicator,
    pub lag: usize,
    pub direction: Direction,
    pub outcome: CellOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarTableEntry {
    pub transformation: Transformation,
    pub indicator: Indicator,
    pub lag: usize,
    pub table: Option<CoefficientTable>,
    pub max_root_modulus: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagSelectionEntry {
    pub transformation: Transformation,
    pub indicator: Indicator,
    pub selection: Option<LagSelection>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub market: String,
    pub lags: Vec<usize>,
    pub cells: Vec<ReportCell>,
    pub var_tables: Vec<VarTableEntry>,
    pub lag_selections: Vec<LagSelectionEntry>,
}

impl ExperimentReport {
    pub fn cell(
        &self,
        transformation: Transformation,
        indicator: Indicator,
        lag: usize,
        direction: Direction,
    ) -> Option<&ReportCell> {
        self.cells.iter().find(|c| {
            c.transformation == transformation
                && c.indicator == indicator
                && c.lag == lag
                && c.direction == direction
        })
    }

    pub fn result(
        &self,
        transformation: Transformation,
        indicator: Indicator,
        lag: usize,
        direction: Direction,
    ) -> Option<&GrangerResult> {
        self.cell(transformation, indicator, lag, direction)
            .and_then(|c| c.outcome.result())
    }

    pub fn significant_count(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| c.outcome.result().is_some_and(|r| r.significant_5pct))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSettings {
    pub lags: Vec<usize>,
    /// Runs AIC lag selection per family when set.
    pub p_max_for_aic: Option<usize>,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            lags: vec![1, 2],
            p_max_for_aic: None,
        }
    }
}

/// Builds the aligned `(returns, sentiment)` frame for one family.
pub fn family_frame(
    returns: &TimeSeries,
    sentiment: &TimeSeries,
    indicator: Indicator,
    transformation: Transformation,
) -> Result<AlignedFrame> {
    let prepare = |s: &TimeSeries, base: &str, differenced: bool| -> Result<TimeSeries> {
        let s = s.clone().renamed(base);
        if differenced {
            diff_series(&s)
        } else {
            Ok(s)
        }
    };
    let r = prepare(returns, RETURNS_NAME, transformation.differences_returns())?;
    let s = prepare(sentiment, indicator.name(), transformation.differences_sentiment())?;
    align(&[&r, &s])
}

/// Runs both test directions at every lag for each transformation and
/// indicator, plus the companion VAR fits. Failures are recorded per cell.
pub fn run_experiment(
    returns: &TimeSeries,
    sent: &TimeSeries,
    arms: &TimeSeries,
    market: &str,
    settings: &ExperimentSettings,
) -> Result<ExperimentReport> {
    if settings.lags.is_empty() || settings.lags.contains(&0) {
        return Err(Error::InvalidInput(
            "lags must be non-empty and at least 1".into(),
        ));
    }
    let mut cells = Vec::new();
    let mut var_tables = Vec::new();
    let mut lag_selections = Vec::new();
    for transformation in Transformation::ALL {
        for indicator in Indicator::ALL {
            let sentiment = match indicator {
                Indicator::Sent => sent,
                Indicator::Arms => arms,
            };
            let frame = family_frame(returns, sentiment, indicator, transformation);
            let r_name = series_name(RETURNS_NAME, transformation.differences_returns());
            let s_name = series_name(indicator.name(), transformation.differences_sentiment());
            for &lag in &settings.lags {
                for direction in Direction::ALL {
                    let (cause, effect) = match direction {
                        Direction::Test1 => (&r_name, &s_name),
                        Direction::Test2 => (&s_name, &r_name),
                    };
                    let outcome = match frame
                        .as_ref()
                        .map_err(|e| e.to_string())
                        .and_then(|f| granger_test(f, cause, effect, lag).map_err(|e| e.to_string()))
                    {
                        Ok(r) => CellOutcome::Available(r),
                        Err(reason) => CellOutcome::Unavailable { reason },
                    };
                    cells.push(ReportCell {
                        transformation,
                        indicator,
                        lag,
                        direction,
                        outcome,
                    });
                }
                let fit = frame
                    .as_ref()
                    .map_err(|e| e.to_string())
                    .and_then(|f| fit_var(f, lag).map_err(|e| e.to_string()));
                var_tables.push(match fit {
                    Ok(fit) => VarTableEntry {
                        transformation,
                        indicator,
                        lag,
                        table: Some(coefficient_table(&fit)),
                        max_root_modulus: Some(fit.max_root_modulus),
                        error: None,
                    },
                    Err(e) => VarTableEntry {
                        transformation,
                        indicator,
                        lag,
                        table: None,
                        max_root_modulus: None,
                        error: Some(e),
                    },
                });
            }
            if let Some(p_max) = settings.p_max_for_aic {
                let sel = frame
                    .as_ref()
                    .map_err(|e| e.to_string())
                    .and_then(|f| lag_selection(f, p_max).map_err(|e| e.to_string()));
                let (selection, error) = match sel {
                    Ok(s) => (Some(s), None),
                    Err(e) => (None, Some(e)),
                };
                lag_selections.push(LagSelectionEntry {
                    transformation,
                    indicator,
                    selection,
                    error,
                });
            }
        }
    }
    Ok(ExperimentReport {
        market: market.to_string(),
        lags: settings.lags.clone(),
        cells,
        var_tables,
        lag_selections,
    })
}
