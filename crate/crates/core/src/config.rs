//! Strict JSON run configuration.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const DEFAULT_LAGS: [usize; 2] = [1, 2];
pub const DEFAULT_P_MAX: usize = 10;

const TOP_LEVEL_KEYS: [&str; 7] = [
    "markets",
    "lags",
    "p_max_for_aic",
    "run_adf",
    "output_dir",
    "formats",
    "seed",
];
const MARKET_KEYS: [&str; 3] = ["label", "panel_path", "index_path"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketConfig {
    pub label: String,
    pub panel_path: PathBuf,
    #[serde(default)]
    pub index_path: Option<PathBuf>,
}

fn default_lags() -> Vec<usize> {
    DEFAULT_LAGS.to_vec()
}

fn default_p_max() -> usize {
    DEFAULT_P_MAX
}

fn default_true() -> bool {
    true
}

fn default_formats() -> BTreeSet<OutputFormat> {
    [OutputFormat::Json, OutputFormat::Csv, OutputFormat::Markdown].into()
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub markets: Vec<MarketConfig>,
    #[serde(default = "default_lags")]
    pub lags: Vec<usize>,
    #[serde(default = "default_p_max")]
    pub p_max_for_aic: usize,
    #[serde(default = "default_true")]
    pub run_adf: bool,
    pub output_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: BTreeSet<OutputFormat>,
    /// Only used when generating fixtures.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn closest<'a>(key: &str, known: &[&'a str]) -> Option<&'a str> {
    known
        .iter()
        .map(|k| (strsim::levenshtein(key, k), *k))
        .filter(|(d, _)| *d <= 3)
        .min()
        .map(|(_, k)| k)
}

fn reject_unknown(object: &serde_json::Map<String, Value>, known: &[&str], prefix: &str) -> Result<()> {
    for key in object.keys() {
        if !known.contains(&key.as_str()) {
            let hint = closest(key, known)
                .map(|k| format!("; did you mean `{k}`?"))
                .unwrap_or_default();
            return Err(Error::config(
                format!("{prefix}{key}"),
                format!("unknown field `{key}`{hint}"),
            ));
        }
    }
    Ok(())
}

fn missing_field_name(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("missing field `")?;
    rest.split('`').next()
}

impl RunConfig {
    /// Parses and validates config text. Relative paths resolve against
    /// `base_dir`.
    pub fn from_json_str(text: &str, base_dir: &Path) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::config("<root>", format!("invalid JSON: {e}")))?;
        let Some(object) = value.as_object() else {
            return Err(Error::config("<root>", "expected a JSON object"));
        };
        reject_unknown(object, &TOP_LEVEL_KEYS, "")?;
        if let Some(Value::Array(markets)) = object.get("markets") {
            for (i, m) in markets.iter().enumerate() {
                if let Some(m) = m.as_object() {
                    reject_unknown(m, &MARKET_KEYS, &format!("markets[{i}]."))?;
                }
            }
        }

        let mut config: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            let message = e.inner().to_string();
            let field = match (missing_field_name(&message), path.as_str()) {
                (Some(name), ".") => name.to_string(),
                (Some(name), parent) => format!("{parent}.{name}"),
                (None, p) => p.to_string(),
            };
            Error::config(field, message)
        })?;
        config.validate()?;
        config.resolve_paths(base_dir);
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lags.is_empty() {
            return Err(Error::config("lags", "must list at least one lag order"));
        }
        if self.lags.contains(&0) {
            return Err(Error::config("lags", "lag orders must be at least 1"));
        }
        if self.p_max_for_aic == 0 {
            return Err(Error::config("p_max_for_aic", "must be at least 1"));
        }
        if self.markets.is_empty() {
            return Err(Error::config("markets", "must list at least one market"));
        }
        if self.formats.is_empty() {
            return Err(Error::config("formats", "must list at least one output format"));
        }
        let mut labels = BTreeSet::new();
        for (i, m) in self.markets.iter().enumerate() {
            let valid = !m.label.is_empty()
                && m
                    .label
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
            if !valid {
                return Err(Error::config(
                    format!("markets[{i}].label"),
                    format!("`{}` is not a usable file-name label", m.label),
                ));
            }
            if !labels.insert(m.label.as_str()) {
                return Err(Error::config(
                    format!("markets[{i}].label"),
                    format!("duplicate label `{}`", m.label),
                ));
            }
        }
        Ok(())
    }

    fn resolve_paths(&mut self, base: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut self.output_dir);
        for m in &mut self.markets {
            resolve(&mut m.panel_path);
            if let Some(index) = &mut m.index_path {
                resolve(index);
            }
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    RunConfig::from_json_str(&text, base)
}
