use serde::Serialize;

use super::ols::{ols_fit, DesignMatrix, OlsFit};
use crate::error::{Error, Result};
use crate::ingest::TimeSeries;

/// Constant-only Dickey–Fuller critical values (asymptotic).
pub const ADF_CRITICAL_1PCT: f64 = -3.43;
pub const ADF_CRITICAL_5PCT: f64 = -2.86;
pub const ADF_CRITICAL_10PCT: f64 = -2.57;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub lags_used: usize,
    pub nobs: usize,
    pub reject_unit_root_5pct: bool,
}

/// Regression of `Δs_t` on `[1, s_{t-1}, Δs_{t-1}, …, Δs_{t-q}]` for
/// `t` in `first..n`.
fn adf_regression(levels: &[f64], q: usize, first: usize) -> Result<OlsFit> {
    let n = levels.len();
    let rows = n - first;
    let cols = 2 + q;
    let mut values = Vec::with_capacity(rows * cols);
    let mut y = Vec::with_capacity(rows);
    for t in first..n {
        y.push(levels[t] - levels[t - 1]);
        values.push(1.0);
        values.push(levels[t - 1]);
        for j in 1..=q {
            values.push(levels[t - j] - levels[t - j - 1]);
        }
    }
    let mut names = vec!["const".to_string(), "level_lag1".to_string()];
    names.extend((1..=q).map(|j| format!("diff_lag{j}")));
    let x = DesignMatrix::new(rows, cols, values, names)?;
    ols_fit(&x, &y)
}

/// Augmented Dickey–Fuller test with intercept. The augmentation order is
/// chosen in `0..=max_lags` by AIC on a common sample, then the regression
/// is refit on all rows available for that order.
pub fn adf_test(s: &TimeSeries, max_lags: usize) -> Result<AdfResult> {
    if s.defined_count() != s.len() {
        return Err(Error::InvalidInput(format!(
            "ADF needs a fully defined series, `{}` has missing values",
            s.name()
        )));
    }
    let levels = s.defined_values();
    if levels.len() < max_lags + 10 {
        return Err(Error::InsufficientData(format!(
            "ADF on `{}` with {max_lags} lags needs {} points, got {}",
            s.name(),
            max_lags + 10,
            levels.len()
        )));
    }

    let first = max_lags + 1;
    let nobs = (levels.len() - first) as f64;
    let mut best: Option<(f64, usize)> = None;
    for q in 0..=max_lags {
        let fit = adf_regression(&levels, q, first)?;
        let k = (q + 2) as f64;
        let aic = libm::log(fit.rss / nobs) + 2.0 * k / nobs;
        if best.is_none_or(|(b, _)| aic < b) {
            best = Some((aic, q));
        }
    }
    let (_, lags_used) = best.expect("at least one candidate order");
    let fit = adf_regression(&levels, lags_used, lags_used + 1)?;
    let statistic = fit.tstats[1];
    Ok(AdfResult {
        statistic,
        lags_used,
        nobs: fit.residuals.len(),
        reject_unit_root_5pct: statistic < ADF_CRITICAL_5PCT,
    })
}

/// Default augmentation bound `⌊12 (T/100)^{1/4}⌋`.
pub fn schwert_max_lags(len: usize) -> usize {
    (12.0 * libm::pow(len as f64 / 100.0, 0.25)).floor() as usize
}

#[cfg(test)]
mod tests {
    use chrono::{Days, NaiveDate};

    use super::*;

    fn series(values: &[f64]) -> TimeSeries {
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
        let dates: Vec<_> = (0..values.len())
            .map(|i| start.checked_add_days(Days::new(i as u64)).unwrap())
            .collect();
        TimeSeries::from_values("s", &dates, values).unwrap()
    }

    #[test]
    fn constant_series_is_singular() {
        let s = series(&[3.0; 40]);
        assert!(matches!(adf_test(&s, 2), Err(Error::SingularDesign { .. })));
    }

    #[test]
    fn too_short() {
        let s = series(&[1.0, 2.0, 1.5, 3.0, 2.0]);
        assert!(matches!(adf_test(&s, 1), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn missing_values_rejected() {
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
        let pts = (0..30)
            .map(|i| (start.checked_add_days(Days::new(i)).unwrap(), (i != 3).then_some(i as f64)))
            .collect();
        let s = TimeSeries::new("s", pts).unwrap();
        assert!(matches!(adf_test(&s, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn mean_reverting_sawtooth_rejects() {
        let values: Vec<f64> = (0..200).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } + 0.01 * ((i * 7919) % 13) as f64).collect();
        let r = adf_test(&series(&values), 4).unwrap();
        assert!(r.reject_unit_root_5pct, "{r:?}");
        assert_eq!(r.reject_unit_root_5pct, r.statistic < ADF_CRITICAL_5PCT);
    }

    #[test]
    fn schwert_rule() {
        assert_eq!(schwert_max_lags(100), 12);
        assert_eq!(schwert_max_lags(2500), 26);
    }
}
