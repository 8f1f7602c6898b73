//! Browser bindings for a few interactive views of the toolkit.
//!
//! Each export takes plain numbers and returns a JSON string; the pure
//! functions behind them are usable (and tested) natively.

use breadth_granger::granger::{granger_test, FStat, GrangerResult};
use breadth_granger::simulate::{columns, frame_from_columns, planted_pair, rng, simulate_var};
use breadth_granger::stats::{f_cdf, f_sf};
use breadth_granger::var::lag_selection;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 2000;
const MAX_SAMPLE: usize = 20_000;

#[derive(Debug, Serialize)]
pub struct Curve {
    pub x: Vec<f64>,
    pub cdf: Vec<f64>,
    pub sf: Vec<f64>,
}

/// F(d1, d2) distribution function and upper tail on `n` evenly spaced points
/// of `[0, x_max]`.
pub fn f_curve(d1: usize, d2: usize, x_max: f64, n: usize) -> Result<Curve, String> {
    if d1 == 0 || d2 == 0 {
        return Err("degrees of freedom must be positive".into());
    }
    if !(x_max.is_finite() && x_max > 0.0) {
        return Err("x_max must be a positive number".into());
    }
    if !(2..=MAX_POINTS).contains(&n) {
        return Err(format!("point count must be in 2..={MAX_POINTS}"));
    }
    let x: Vec<f64> = (0..n).map(|i| x_max * i as f64 / (n - 1) as f64).collect();
    Ok(Curve {
        cdf: x.iter().map(|&v| f_cdf(v, d1, d2)).collect(),
        sf: x.iter().map(|&v| f_sf(v, d1, d2)).collect(),
        x,
    })
}

#[derive(Debug, Serialize)]
pub struct TestSummary {
    /// `None` for an exact fit.
    pub f_stat: Option<f64>,
    pub p_value: f64,
    pub significant: bool,
}

impl From<&GrangerResult> for TestSummary {
    fn from(r: &GrangerResult) -> Self {
        Self {
            f_stat: match r.f_stat {
                FStat::Value(f) => Some(f),
                FStat::PerfectFit => None,
            },
            p_value: r.p_value,
            significant: r.significant_5pct,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PlantedDemo {
    pub returns: Vec<f64>,
    pub sentiment: Vec<f64>,
    pub test1: TestSummary,
    pub test2: TestSummary,
}

/// Simulates `sent_t = coupling · r_{t-1} + ε_t` and runs both test directions.
pub fn planted_granger(seed: u64, t: usize, coupling: f64, lag: usize) -> Result<PlantedDemo, String> {
    if t > MAX_SAMPLE {
        return Err(format!("sample size is capped at {MAX_SAMPLE}"));
    }
    if !coupling.is_finite() {
        return Err("coupling must be finite".into());
    }
    let (r, s) = planted_pair(&mut rng(seed), t, coupling);
    let frame = frame_from_columns(vec![("RT".into(), r.clone()), ("SENT".into(), s.clone())]).map_err(|e| e.to_string())?;
    let test1 = granger_test(&frame, "RT", "SENT", lag).map_err(|e| e.to_string())?;
    let test2 = granger_test(&frame, "SENT", "RT", lag).map_err(|e| e.to_string())?;
    Ok(PlantedDemo {
        returns: r,
        sentiment: s,
        test1: (&test1).into(),
        test2: (&test2).into(),
    })
}

#[derive(Debug, Serialize)]
pub struct AicProfile {
    pub p: Vec<usize>,
    pub aic: Vec<f64>,
    pub selected: usize,
    pub t_eff: usize,
}

/// AIC over `1..=p_max` for a simulated bivariate VAR(2) whose lag-2 block is
/// scaled by `strength` (0 gives a VAR(1)).
pub fn var2_aic_profile(seed: u64, t: usize, p_max: usize, strength: f64) -> Result<AicProfile, String> {
    if t > MAX_SAMPLE {
        return Err(format!("sample size is capped at {MAX_SAMPLE}"));
    }
    if !(strength.is_finite() && (0.0..=1.0).contains(&strength)) {
        return Err("strength must be in [0, 1]".into());
    }
    let theta = vec![
        vec![vec![0.5, 0.1], vec![0.4, 0.5]],
        vec![vec![-0.3 * strength, 0.0], vec![0.1 * strength, -0.3 * strength]],
    ];
    let rows = simulate_var(&mut rng(seed), &[0.1, -0.05], &theta, 1.0, t, 200);
    let frame = frame_from_columns(columns(&rows, &["Y1", "Y2"])).map_err(|e| e.to_string())?;
    let sel = lag_selection(&frame, p_max).map_err(|e| e.to_string())?;
    Ok(AicProfile {
        p: sel.criteria.iter().map(|c| c.0).collect(),
        aic: sel.criteria.iter().map(|c| c.1).collect(),
        selected: sel.selected,
        t_eff: sel.t_eff,
    })
}

fn to_js<T: Serialize>(value: Result<T, String>) -> Result<String, JsValue> {
    value
        .and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = fCurve)]
pub fn f_curve_js(d1: u32, d2: u32, x_max: f64, n: u32) -> Result<String, JsValue> {
    to_js(f_curve(d1 as usize, d2 as usize, x_max, n as usize))
}

#[wasm_bindgen(js_name = plantedGranger)]
pub fn planted_granger_js(seed: u32, t: u32, coupling: f64, lag: u32) -> Result<String, JsValue> {
    to_js(planted_granger(u64::from(seed), t as usize, coupling, lag as usize))
}

#[wasm_bindgen(js_name = aicProfile)]
pub fn aic_profile_js(seed: u32, t: u32, p_max: u32, strength: f64) -> Result<String, JsValue> {
    to_js(var2_aic_profile(u64::from(seed), t as usize, p_max as usize, strength))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_is_monotone_and_complementary() {
        let c = f_curve(3, 20, 8.0, 101).unwrap();
        assert_eq!(c.x.len(), 101);
        assert_eq!(c.cdf[0], 0.0);
        assert!(c.cdf.windows(2).all(|w| w[1] >= w[0]));
        for (a, b) in c.cdf.iter().zip(&c.sf) {
            assert!((a + b - 1.0).abs() < 1e-12);
        }
        assert!(f_curve(0, 2, 1.0, 10).is_err());
        assert!(f_curve(1, 2, -1.0, 10).is_err());
        assert!(f_curve(1, 2, 1.0, 1).is_err());
    }

    #[test]
    fn planted_direction_is_detected() {
        let demo = planted_granger(4, 500, 0.6, 1).unwrap();
        assert!(demo.test1.significant);
        assert!(demo.test1.p_value < 1e-10);
        assert_eq!(demo.returns.len(), 500);
        assert!(planted_granger(4, 8, 0.6, 2).is_err());
    }

    #[test]
    fn aic_profile_covers_every_order() {
        let prof = var2_aic_profile(11, 1000, 6, 1.0).unwrap();
        assert_eq!(prof.p, vec![1, 2, 3, 4, 5, 6]);
        // Underfitting a strong lag-2 block at T = 1000 is practically impossible.
        assert!(prof.selected >= 2);
        let best = prof.aic.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(prof.aic[prof.selected - 1], best);
        assert!(var2_aic_profile(1, 100, 3, 1.5).is_err());
    }

    #[test]
    fn results_serialize_to_json() {
        let text = serde_json::to_string(&planted_granger(1, 200, 0.0, 2).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["test2"]["p_value"].as_f64().is_some());
    }
}
