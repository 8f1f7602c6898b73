//! Numerical kernel: least squares, the F distribution, the VAR information
//! criterion and the augmented Dickey–Fuller check.

mod adf;
mod distribution;
mod ols;

pub use adf::{adf_test, schwert_max_lags, AdfResult, ADF_CRITICAL_1PCT, ADF_CRITICAL_10PCT, ADF_CRITICAL_5PCT};
pub use distribution::{beta_regularized, f_cdf, f_sf, ln_beta, ln_gamma, t_two_sided_p};
pub use ols::{ols_fit, DesignMatrix, OlsFit, MAX_CONDITION};

/// Multivariate AIC for a VAR(p) with intercept:
/// `ln det Σ + 2 (k² p + k) / T_eff`, with Σ the ML residual covariance.
pub fn aic_var(log_det_sigma: f64, t_eff: usize, k: usize, p: usize) -> f64 {
    let params = (k * k * p + k) as f64;
    log_det_sigma + 2.0 * params / t_eff as f64
}
