//! VAR(p) estimation by equation-wise least squares, AIC lag selection and
//! coefficient tables.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::AlignedFrame;
use crate::stats::{aic_var, ols_fit, t_two_sided_p, DesignMatrix};

/// Rows a frame must have beyond `k·p + k` before a VAR(p) is attempted.
pub const MIN_HEADROOM: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VarSpec {
    pub p: usize,
    pub column_names: Vec<String>,
}

/// Intercepts plus `p` lag matrices. `theta[l][i][j]` is the coefficient of
/// series `j` at lag `l + 1` in the equation for series `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefBlock {
    pub mu: Vec<f64>,
    pub theta: Vec<Vec<Vec<f64>>>,
}

impl CoefBlock {
    /// Per-equation regressor vectors in design order
    /// `[1, Y_{t-1}, …, Y_{t-p}]`.
    pub fn flatten(&self) -> Vec<Vec<f64>> {
        (0..self.mu.len())
            .map(|i| {
                let mut row = vec![self.mu[i]];
                for lag in &self.theta {
                    row.extend_from_slice(&lag[i]);
                }
                row
            })
            .collect()
    }

    pub fn from_flat(rows: &[Vec<f64>], p: usize) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != 1 + k * p) {
            return Err(Error::InvalidInput(format!(
                "expected {k} rows of {} coefficients",
                1 + k * p
            )));
        }
        let mu = rows.iter().map(|r| r[0]).collect();
        let theta = (0..p)
            .map(|l| {
                rows.iter()
                    .map(|r| r[1 + l * k..1 + (l + 1) * k].to_vec())
                    .collect()
            })
            .collect();
        Ok(Self { mu, theta })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarFit {
    pub spec: VarSpec,
    pub coefs: CoefBlock,
    pub se: CoefBlock,
    pub tstats: CoefBlock,
    /// `T_eff × k`, row per observation.
    pub residuals: Vec<Vec<f64>>,
    /// ML residual covariance `EᵀE / T_eff`.
    pub sigma: Vec<Vec<f64>>,
    pub rss: Vec<f64>,
    pub t_eff: usize,
    pub df_resid: usize,
    /// Largest modulus among the companion-matrix eigenvalues; below 1 for a
    /// stable system. Reported only.
    pub max_root_modulus: f64,
}

impl VarFit {
    pub fn k(&self) -> usize {
        self.spec.column_names.len()
    }

    pub fn log_det_sigma(&self) -> Result<f64> {
        log_det(&self.sigma)
    }
}

/// Responses and shared regressors of a VAR(p).
#[derive(Debug, Clone, PartialEq)]
pub struct LagMatrices {
    /// `T_eff × k`, row per observation.
    pub y: Vec<Vec<f64>>,
    pub x: DesignMatrix,
}

impl LagMatrices {
    pub fn response(&self, j: usize) -> Vec<f64> {
        self.y.iter().map(|row| row[j]).collect()
    }
}

fn check_length(frame: &AlignedFrame, p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidInput("lag order must be at least 1".into()));
    }
    let k = frame.width();
    let need = k * p + k + MIN_HEADROOM;
    if frame.rows() <= need {
        return Err(Error::InsufficientData(format!(
            "VAR({p}) on {k} series needs more than {need} rows, frame has {}",
            frame.rows()
        )));
    }
    Ok(())
}

/// Regressor name as shown in tables, e.g. `RT (-1)`.
pub fn lag_label(series: &str, lag: usize) -> String {
    format!("{series} (-{lag})")
}

/// Lag matrices using observations `start..T` (0-based), `start >= p`.
fn lag_matrices_from(frame: &AlignedFrame, p: usize, start: usize) -> Result<LagMatrices> {
    debug_assert!(start >= p);
    let k = frame.width();
    let rows = frame.rows() - start;
    let cols = 1 + k * p;
    let mut values = Vec::with_capacity(rows * cols);
    let mut y = Vec::with_capacity(rows);
    for t in start..frame.rows() {
        y.push((0..k).map(|j| frame.value(t, j)).collect());
        values.push(1.0);
        for lag in 1..=p {
            for j in 0..k {
                values.push(frame.value(t - lag, j));
            }
        }
    }
    let mut names = vec!["C".to_string()];
    for lag in 1..=p {
        names.extend(frame.names().iter().map(|n| lag_label(n, lag)));
    }
    Ok(LagMatrices {
        y,
        x: DesignMatrix::new(rows, cols, values, names)?,
    })
}

/// Stacks `Y_t` for `t = p+1..T` against `[1, Y_{t-1}, …, Y_{t-p}]`.
pub fn build_lag_matrix(frame: &AlignedFrame, p: usize) -> Result<LagMatrices> {
    check_length(frame, p)?;
    lag_matrices_from(frame, p, p)
}

fn log_det(sigma: &[Vec<f64>]) -> Result<f64> {
    let k = sigma.len();
    let m = DMatrix::from_fn(k, k, |i, j| sigma[i][j]);
    match m.cholesky() {
        Some(ch) => Ok(2.0 * ch.l().diagonal().iter().map(|&d| libm::log(d)).sum::<f64>()),
        None => Err(Error::SingularDesign {
            condition: f64::INFINITY,
        }),
    }
}

fn companion_radius(theta: &[Vec<Vec<f64>>]) -> f64 {
    let p = theta.len();
    let k = theta.first().map_or(0, Vec::len);
    let n = k * p;
    if n == 0 {
        return 0.0;
    }
    let mut c = DMatrix::<f64>::zeros(n, n);
    for (l, lag) in theta.iter().enumerate() {
        for i in 0..k {
            for j in 0..k {
                c[(i, l * k + j)] = lag[i][j];
            }
        }
    }
    for i in k..n {
        c[(i, i - k)] = 1.0;
    }
    c.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn fit_lag_matrices(names: &[String], p: usize, m: &LagMatrices) -> Result<VarFit> {
    let k = names.len();
    let t_eff = m.y.len();
    let mut coef_rows = Vec::with_capacity(k);
    let mut se_rows = Vec::with_capacity(k);
    let mut t_rows = Vec::with_capacity(k);
    let mut resid_cols = Vec::with_capacity(k);
    let mut rss = Vec::with_capacity(k);
    let mut df_resid = 0;
    for j in 0..k {
        let fit = ols_fit(&m.x, &m.response(j))?;
        coef_rows.push(fit.coefs);
        se_rows.push(fit.se);
        t_rows.push(fit.tstats);
        resid_cols.push(fit.residuals);
        rss.push(fit.rss);
        df_resid = fit.df_resid;
    }
    let residuals: Vec<Vec<f64>> = (0..t_eff)
        .map(|t| resid_cols.iter().map(|c| c[t]).collect())
        .collect();
    let sigma = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    resid_cols[a]
                        .iter()
                        .zip(&resid_cols[b])
                        .map(|(x, y)| x * y)
                        .sum::<f64>()
                        / t_eff as f64
                })
                .collect()
        })
        .collect();
    let coefs = CoefBlock::from_flat(&coef_rows, p)?;
    let max_root_modulus = companion_radius(&coefs.theta);
    Ok(VarFit {
        spec: VarSpec {
            p,
            column_names: names.to_vec(),
        },
        coefs,
        se: CoefBlock::from_flat(&se_rows, p)?,
        tstats: CoefBlock::from_flat(&t_rows, p)?,
        residuals,
        sigma,
        rss,
        t_eff,
        df_resid,
        max_root_modulus,
    })
}

/// Fits each equation by least squares on the shared lag design.
pub fn fit_var(frame: &AlignedFrame, p: usize) -> Result<VarFit> {
    let m = build_lag_matrix(frame, p)?;
    fit_lag_matrices(frame.names(), p, &m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagSelection {
    pub p_max: usize,
    pub t_eff: usize,
    /// `(p, AIC)` for `p = 1..=p_max`.
    pub criteria: Vec<(usize, f64)>,
    pub selected: usize,
}

/// AIC for every `p` in `1..=p_max`, all fit on observations `p_max+1..T`.
pub fn lag_selection(frame: &AlignedFrame, p_max: usize) -> Result<LagSelection> {
    check_length(frame, p_max)?;
    let k = frame.width();
    let mut criteria = Vec::with_capacity(p_max);
    let mut t_eff = 0;
    for p in 1..=p_max {
        let m = lag_matrices_from(frame, p, p_max)?;
        let fit = fit_lag_matrices(frame.names(), p, &m)?;
        t_eff = fit.t_eff;
        criteria.push((p, aic_var(fit.log_det_sigma()?, fit.t_eff, k, p)));
    }
    let mut selected = 1;
    let mut best = f64::INFINITY;
    for &(p, aic) in &criteria {
        if aic < best {
            best = aic;
            selected = p;
        }
    }
    Ok(LagSelection {
        p_max,
        t_eff,
        criteria,
        selected,
    })
}

/// Lag order minimizing AIC over `1..=p_max`, ties toward the smaller order.
pub fn select_lag(frame: &AlignedFrame, p_max: usize) -> Result<usize> {
    lag_selection(frame, p_max).map(|s| s.selected)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableCell {
    pub coef: f64,
    pub tstat: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub cells: Vec<TableCell>,
}

/// Coefficients and t-statistics, one column per equation. Rows run over
/// each series' lags in turn and end with the intercept `C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    pub equations: Vec<String>,
    pub rows: Vec<TableRow>,
    pub t_eff: usize,
}

pub fn coefficient_table(fit: &VarFit) -> CoefficientTable {
    let names = &fit.spec.column_names;
    let k = names.len();
    let cell = |coef: f64, tstat: f64| TableCell {
        coef,
        tstat,
        significant: tstat.is_finite() && t_two_sided_p(tstat, fit.df_resid) < 0.05,
    };
    let mut rows = Vec::with_capacity(k * fit.spec.p + 1);
    for (j, name) in names.iter().enumerate() {
        for lag in 0..fit.spec.p {
            rows.push(TableRow {
                label: lag_label(name, lag + 1),
                cells: (0..k)
                    .map(|eq| cell(fit.coefs.theta[lag][eq][j], fit.tstats.theta[lag][eq][j]))
                    .collect(),
            });
        }
    }
    rows.push(TableRow {
        label: "C".into(),
        cells: (0..k)
            .map(|eq| cell(fit.coefs.mu[eq], fit.tstats.mu[eq]))
            .collect(),
    });
    CoefficientTable {
        equations: names.clone(),
        rows,
        t_eff: fit.t_eff,
    }
}
