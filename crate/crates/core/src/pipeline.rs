//! Batch driver: per-market ingestion, indicators, experiment and output.

use std::fs::File;
use std::path::{Path, PathBuf};

use crate::breadth::{arms_series, daily_breadth, diff_series, sent_series};
use crate::config::{OutputFormat, MarketConfig, RunConfig};
use crate::error::{Error, Result};
use crate::granger::{run_experiment, ExperimentReport, ExperimentSettings};
use crate::ingest::{market_return_series, parse_index_csv, parse_price_csv, TimeSeries};
use crate::report;
use crate::stats::{adf_test, schwert_max_lags, AdfResult};

#[derive(Debug)]
pub struct MarketOutcome {
    pub label: String,
    pub files: Vec<PathBuf>,
    pub error: Option<Error>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub markets: Vec<MarketOutcome>,
}

impl RunSummary {
    /// 0 when every market succeeded, otherwise the code of the first
    /// failing market's error.
    pub fn exit_code(&self) -> i32 {
        self.markets
            .iter()
            .find_map(|m| m.error.as_ref())
            .map_or(0, |e| e.kind().exit_code())
    }

    pub fn errors(&self) -> impl Iterator<Item = (&str, &Error)> {
        self.markets
            .iter()
            .filter_map(|m| m.error.as_ref().map(|e| (m.label.as_str(), e)))
    }
}

/// Everything computed for one market before anything is written.
#[derive(Debug, Clone)]
pub struct MarketResults {
    pub returns: TimeSeries,
    pub sent: TimeSeries,
    pub arms: TimeSeries,
    pub report: ExperimentReport,
    pub adf: Option<Vec<(String, std::result::Result<AdfResult, String>)>>,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn compact(series: &TimeSeries) -> Result<TimeSeries> {
    let points = series
        .points()
        .iter()
        .filter(|(_, v)| v.is_some())
        .copied()
        .collect();
    TimeSeries::new(series.name(), points)
}

fn adf_checks(series: &[&TimeSeries]) -> Result<Vec<(String, std::result::Result<AdfResult, String>)>> {
    let mut out = Vec::new();
    for s in series {
        let dense = compact(s)?;
        let result = adf_test(&dense, schwert_max_lags(dense.len())).map_err(|e| e.to_string());
        out.push((s.name().to_string(), result));
    }
    Ok(out)
}

pub fn analyze_market(market: &MarketConfig, config: &RunConfig) -> Result<MarketResults> {
    let panel = parse_price_csv(open(&market.panel_path)?, &market.label)?;
    let index = match &market.index_path {
        Some(path) => Some(parse_index_csv(open(path)?, &format!("{}_index", market.label))?),
        None => None,
    };
    let returns = market_return_series(&panel, index.as_ref())?;
    let breadth = daily_breadth(&panel)?;
    let sent = sent_series(&breadth);
    let arms = arms_series(&breadth);
    let settings = ExperimentSettings {
        lags: config.lags.clone(),
        p_max_for_aic: Some(config.p_max_for_aic),
    };
    let report = run_experiment(&returns, &sent, &arms, &market.label, &settings)?;
    let adf = if config.run_adf {
        let d_returns = diff_series(&returns)?;
        let d_sent = diff_series(&sent)?;
        let d_arms = diff_series(&arms)?;
        Some(adf_checks(&[&returns, &sent, &arms, &d_returns, &d_sent, &d_arms])?)
    } else {
        None
    };
    Ok(MarketResults {
        returns,
        sent,
        arms,
        report,
        adf,
    })
}

/// Rendered `(file name, contents)` pairs for one market.
pub fn render_market(label: &str, results: &MarketResults, config: &RunConfig) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let report = &results.report;
    if config.formats.contains(&OutputFormat::Json) {
        files.push((format!("{label}_granger.json"), report::granger_json(report)));
    }
    if config.formats.contains(&OutputFormat::Csv) {
        files.push((format!("{label}_granger.csv"), report::granger_csv(report)));
        files.push((format!("{label}_var_tables.csv"), report::var_tables_csv(report)));
    }
    if config.formats.contains(&OutputFormat::Markdown) {
        files.push((format!("{label}_granger.md"), report::granger_markdown(report)));
        files.push((format!("{label}_var_tables.md"), report::var_tables_markdown(report)));
    }
    files.push((
        format!("{label}_indicators.csv"),
        report::indicators_csv(&[&results.returns, &results.sent, &results.arms]),
    ));
    if let Some(adf) = &results.adf {
        files.push((format!("{label}_adf.csv"), report::adf_csv(adf)));
    }
    files
}

fn process_market(market: &MarketConfig, config: &RunConfig) -> Result<Vec<PathBuf>> {
    let results = analyze_market(market, config)?;
    let mut written = Vec::new();
    for (name, text) in render_market(&market.label, &results, config) {
        let path = config.output_dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn check_output_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write_probe");
    std::fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    std::fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

/// Runs every market independently; one market's failure never affects the
/// others. Fails up front only if the output directory is unusable.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    check_output_dir(&config.output_dir)?;
    let markets = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .markets
            .iter()
            .map(|m| scope.spawn(move || process_market(m, config)))
            .collect();
        handles
            .into_iter()
            .zip(&config.markets)
            .map(|(h, m)| {
                let result = h.join().expect("market worker panicked");
                match result {
                    Ok(files) => MarketOutcome {
                        label: m.label.clone(),
                        files,
                        error: None,
                    },
                    Err(e) => MarketOutcome {
                        label: m.label.clone(),
                        files: Vec::new(),
                        error: Some(e),
                    },
                }
            })
            .collect()
    });
    Ok(RunSummary { markets })
}
