//! Markdown, CSV and JSON renderings of experiment reports, indicator
//! series and ADF checks. All output is deterministic for a given input.

pub mod format;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::NaiveDate;

use crate::granger::{CellOutcome, Direction, ExperimentReport, Indicator, Transformation};
use crate::ingest::TimeSeries;
use crate::stats::AdfResult;

fn csv_string(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields")
}

fn sentiment_label(indicator: Indicator, transformation: Transformation) -> String {
    if transformation.differences_sentiment() {
        format!("Δ{}", indicator.name())
    } else {
        indicator.name().to_string()
    }
}

fn returns_label(transformation: Transformation) -> &'static str {
    if transformation.differences_returns() {
        "ΔRT"
    } else {
        "RT"
    }
}

/// One p-value grid per transformation: rows are indicators, columns run
/// over lags and then test directions.
pub fn granger_markdown(report: &ExperimentReport) -> String {
    let mut out = String::new();
    writeln!(out, "# Granger causality: {}", report.market).unwrap();
    for transformation in Transformation::ALL {
        let rt = returns_label(transformation);
        writeln!(out).unwrap();
        writeln!(out, "## {} ({})", transformation.title(), report.market).unwrap();
        writeln!(out).unwrap();
        let mut header = String::from("| |");
        let mut rule = String::from("|---|");
        for lag in &report.lags {
            for direction in Direction::ALL {
                let test = match direction {
                    Direction::Test1 => "Test1",
                    Direction::Test2 => "Test2",
                };
                write!(header, " Lag{lag} {test} |").unwrap();
                rule.push_str("---|");
            }
        }
        writeln!(out, "{header}").unwrap();
        writeln!(out, "{rule}").unwrap();
        for indicator in Indicator::ALL {
            let mut row = format!("| {} |", sentiment_label(indicator, transformation));
            for &lag in &report.lags {
                for direction in Direction::ALL {
                    let text = match report.cell(transformation, indicator, lag, direction).map(|c| &c.outcome) {
                        Some(CellOutcome::Available(r)) => {
                            let star = if r.significant_5pct { "*" } else { "" };
                            format!("{}{star}", format::p_value(r.p_value))
                        }
                        _ => "n/a".to_string(),
                    };
                    write!(row, " {text} |").unwrap();
                }
            }
            writeln!(out, "{row}").unwrap();
        }
        writeln!(out).unwrap();
        writeln!(
            out,
            "Test1: {rt} → sentiment. Test2: sentiment → {rt}. Entries are p-values; `*` marks p < 0.05."
        )
        .unwrap();
    }
    out
}

pub const GRANGER_CSV_HEADER: [&str; 14] = [
    "market",
    "transformation",
    "indicator",
    "lag",
    "direction",
    "cause",
    "effect",
    "t_eff",
    "f_stat",
    "p_value",
    "p_value_display",
    "significant_5pct",
    "status",
    "reason",
];

pub fn granger_csv(report: &ExperimentReport) -> String {
    let mut rows = vec![GRANGER_CSV_HEADER.iter().map(|s| s.to_string()).collect()];
    for cell in &report.cells {
        let mut row = vec![
            report.market.clone(),
            cell.transformation.slug().to_string(),
            cell.indicator.name().to_string(),
            cell.lag.to_string(),
            format!("{:?}", cell.direction).to_lowercase(),
        ];
        match &cell.outcome {
            CellOutcome::Available(r) => row.extend([
                r.cause.clone(),
                r.effect.clone(),
                r.t_eff.to_string(),
                r.f_stat
                    .value()
                    .map_or_else(|| "perfect_fit".to_string(), format::raw),
                format::raw(r.p_value),
                format::p_value(r.p_value),
                r.significant_5pct.to_string(),
                "available".to_string(),
                String::new(),
            ]),
            CellOutcome::Unavailable { reason } => {
                row.extend(std::iter::repeat_n(String::new(), 7));
                row.extend(["unavailable".to_string(), reason.clone()]);
            }
        }
        rows.push(row);
    }
    csv_string(rows)
}

pub fn granger_json(report: &ExperimentReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn var_tables_markdown(report: &ExperimentReport) -> String {
    let mut out = String::new();
    writeln!(out, "# VAR estimates: {}", report.market).unwrap();
    for entry in &report.var_tables {
        let rt = returns_label(entry.transformation);
        let sent = sentiment_label(entry.indicator, entry.transformation);
        writeln!(out).unwrap();
        writeln!(out, "## VAR({}) {rt} & {sent} ({})", entry.lag, report.market).unwrap();
        writeln!(out).unwrap();
        let Some(table) = &entry.table else {
            writeln!(out, "unavailable: {}", entry.error.as_deref().unwrap_or("unknown")).unwrap();
            continue;
        };
        writeln!(out, "| | {} |", table.equations.join(" | ")).unwrap();
        writeln!(out, "|---|{}", "---|".repeat(table.equations.len())).unwrap();
        for row in &table.rows {
            let cells: Vec<String> = row
                .cells
                .iter()
                .map(|c| format::coef_cell(c.coef, c.tstat, c.significant))
                .collect();
            writeln!(out, "| {} | {} |", row.label, cells.join(" | ")).unwrap();
        }
        writeln!(out).unwrap();
        writeln!(
            out,
            "t-statistics in parentheses; `*` significant at 5%. T_eff = {}; largest companion root modulus = {}.",
            table.t_eff,
            entry.max_root_modulus.map_or_else(|| "n/a".to_string(), format::fixed4)
        )
        .unwrap();
    }
    if !report.lag_selections.is_empty() {
        writeln!(out).unwrap();
        writeln!(out, "## AIC lag selection ({})", report.market).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "| pair | p_max | T_eff | selected p |").unwrap();
        writeln!(out, "|---|---|---|---|").unwrap();
        for entry in &report.lag_selections {
            let pair = format!(
                "{} & {}",
                returns_label(entry.transformation),
                sentiment_label(entry.indicator, entry.transformation)
            );
            match &entry.selection {
                Some(s) => writeln!(out, "| {pair} | {} | {} | {} |", s.p_max, s.t_eff, s.selected).unwrap(),
                None => writeln!(out, "| {pair} | n/a | n/a | n/a |").unwrap(),
            }
        }
    }
    out
}

pub fn var_tables_csv(report: &ExperimentReport) -> String {
    let mut rows = vec![[
        "market",
        "transformation",
        "indicator",
        "lag",
        "equation",
        "regressor",
        "coef",
        "tstat",
        "display",
        "significant_5pct",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()];
    for entry in &report.var_tables {
        let Some(table) = &entry.table else { continue };
        for (e, equation) in table.equations.iter().enumerate() {
            for row in &table.rows {
                let c = row.cells[e];
                rows.push(vec![
                    report.market.clone(),
                    entry.transformation.slug().to_string(),
                    entry.indicator.name().to_string(),
                    entry.lag.to_string(),
                    equation.clone(),
                    row.label.clone(),
                    format::raw(c.coef),
                    if c.tstat.is_nan() { String::new() } else { format::raw(c.tstat) },
                    format::coef_cell(c.coef, c.tstat, c.significant),
                    c.significant.to_string(),
                ]);
            }
        }
    }
    csv_string(rows)
}

/// Wide `date,<name>,...` table over the union of dates; missing values are
/// empty fields.
pub fn indicators_csv(series: &[&TimeSeries]) -> String {
    let mut table: BTreeMap<NaiveDate, Vec<Option<f64>>> = BTreeMap::new();
    for (j, s) in series.iter().enumerate() {
        for &(d, v) in s.points() {
            table.entry(d).or_insert_with(|| vec![None; series.len()])[j] = v;
        }
    }
    let mut rows = vec![std::iter::once("date".to_string())
        .chain(series.iter().map(|s| s.name().to_string()))
        .collect::<Vec<_>>()];
    for (d, values) in table {
        let mut row = vec![d.to_string()];
        row.extend(values.into_iter().map(|v| v.map(format::raw).unwrap_or_default()));
        rows.push(row);
    }
    csv_string(rows)
}

/// `date,value` with missing dates omitted.
pub fn series_csv(series: &TimeSeries) -> String {
    let mut rows = vec![vec!["date".to_string(), "value".to_string()]];
    rows.extend(
        series
            .points()
            .iter()
            .filter_map(|(d, v)| v.map(|x| vec![d.to_string(), format::raw(x)])),
    );
    csv_string(rows)
}

pub fn adf_csv(results: &[(String, Result<AdfResult, String>)]) -> String {
    let mut rows = vec![["series", "statistic", "lags_used", "nobs", "reject_unit_root_5pct", "error"]
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()];
    for (name, result) in results {
        rows.push(match result {
            Ok(r) => vec![
                name.clone(),
                format::fixed4(r.statistic),
                r.lags_used.to_string(),
                r.nobs.to_string(),
                r.reject_unit_root_5pct.to_string(),
                String::new(),
            ],
            Err(e) => vec![name.clone(), String::new(), String::new(), String::new(), String::new(), e.clone()],
        });
    }
    csv_string(rows)
}
