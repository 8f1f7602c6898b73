//! Independent oracles and builders shared by the integration tests.
#![allow(dead_code)]

use breadth_granger::ingest::{PriceBar, PricePanel};
use breadth_granger::simulate::business_days;
use chrono::NaiveDate;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

/// Solves `XᵀX b = Xᵀy` in exact rational arithmetic. Inputs are converted
/// to their exact binary values, so the only rounding is the final
/// conversion back to f64.
pub fn rational_normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    exact_coefficients(x, y).iter().map(rational_to_f64).collect()
}

/// Residual sum of squares of the exact least-squares fit.
pub fn rational_rss(x: &[Vec<f64>], y: &[f64]) -> BigRational {
    let b = exact_coefficients(x, y);
    x.iter().zip(y).fold(BigRational::zero(), |acc, (row, &v)| {
        let fitted = row.iter().zip(&b).fold(BigRational::zero(), |s, (&xi, bi)| s + exact(xi) * bi);
        let e = exact(v) - fitted;
        acc + &e * &e
    })
}

fn exact_coefficients(x: &[Vec<f64>], y: &[f64]) -> Vec<BigRational> {
    let k = x[0].len();
    let xr: Vec<Vec<BigRational>> = x.iter().map(|r| r.iter().map(|&v| exact(v)).collect()).collect();
    let yr: Vec<BigRational> = y.iter().map(|&v| exact(v)).collect();
    let mut m: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..k)
                .map(|j| xr.iter().fold(BigRational::zero(), |acc, r| acc + &r[i] * &r[j]))
                .collect();
            row.push(xr.iter().zip(&yr).fold(BigRational::zero(), |acc, (r, v)| acc + &r[i] * v));
            row
        })
        .collect();
    for c in 0..k {
        let pivot = (c..k).find(|&r| !m[r][c].is_zero()).expect("nonsingular system");
        m.swap(c, pivot);
        let head = m[c][c].clone();
        for v in m[c].iter_mut() {
            *v = &*v / &head;
        }
        for r in 0..k {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                let pivot_row = m[c].clone();
                for (v, p) in m[r].iter_mut().zip(&pivot_row) {
                    *v = &*v - &f * p;
                }
            }
        }
    }
    m.into_iter().map(|mut row| row.swap_remove(k)).collect()
}

/// Correctly scaled conversion; avoids overflow of huge numerators and
/// denominators in `ToPrimitive`.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let shift = q.numer().bits() as i64 - q.denom().bits() as i64 - 60;
    let scaled = if shift > 0 {
        q / BigRational::from_integer(BigInt::from(1) << shift as usize)
    } else {
        q * BigRational::from_integer(BigInt::from(1) << (-shift) as usize)
    };
    let mantissa = scaled.abs().to_integer().to_f64().expect("fits");
    let v = mantissa * 2f64.powi(shift as i32);
    if q.is_negative() {
        -v
    } else {
        v
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k15 = 0.0;
    let mut g7 = 0.0;
    for (i, (&x, &w)) in GK_NODES.iter().zip(&K15_WEIGHTS).enumerate() {
        let pair = if x == 0.0 { f(c) } else { f(c - h * x) + f(c + h * x) };
        k15 += w * pair;
        if i % 2 == 1 {
            g7 += G7_WEIGHTS[i / 2] * pair;
        }
    }
    (k15 * h, (k15 - g7).abs() * h)
}

/// Adaptive G7-K15 quadrature with interval bisection.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn go<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gauss_kronrod(f, a, b);
        if err <= tol || depth >= 40 {
            return value;
        }
        let m = 0.5 * (a + b);
        go(f, a, m, tol / 2.0, depth + 1) + go(f, m, b, tol / 2.0, depth + 1)
    }
    go(f, a, b, tol, 0)
}

/// F(d1, d2) density with normalising constant from statrs' log-gamma.
pub fn f_density(t: f64, d1: f64, d2: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    if t <= 0.0 {
        return 0.0;
    }
    let ln_b = ln_gamma(d1 / 2.0) + ln_gamma(d2 / 2.0) - ln_gamma((d1 + d2) / 2.0);
    let ln_c = 0.5 * d1 * (d1 / d2).ln() - ln_b;
    (ln_c + (0.5 * d1 - 1.0) * t.ln() - 0.5 * (d1 + d2) * (d1 * t / d2).ln_1p()).exp()
}

/// `P(F ≤ x)` by integrating the density in `s = √t`, which removes the
/// integrable singularity at zero when `d1 = 1`.
pub fn f_cdf_quadrature(x: f64, d1: f64, d2: f64) -> f64 {
    let g = |s: f64| 2.0 * s * f_density(s * s, d1, d2);
    integrate(&g, 0.0, x.sqrt(), 1e-13)
}

/// Builds a panel from `closes[ticker][day]` and `volumes[ticker][day]` on a
/// weekday calendar. `None` closes are missing bars.
pub fn panel_from_grid(closes: &[Vec<Option<f64>>], volumes: &[Vec<u64>]) -> PricePanel {
    let days = closes.iter().map(Vec::len).max().unwrap_or(0);
    let calendar = business_days(NaiveDate::from_ymd_opt(2010, 1, 4).unwrap(), days);
    let mut bars = Vec::new();
    for (i, (row, vols)) in closes.iter().zip(volumes).enumerate() {
        for (d, (c, &v)) in row.iter().zip(vols).enumerate() {
            if let Some(close) = c {
                bars.push(PriceBar {
                    ticker: format!("S{i:02}"),
                    date: calendar[d],
                    close: *close,
                    volume: v,
                });
            }
        }
    }
    PricePanel::new("TEST", bars).expect("valid panel")
}

pub fn relative_error(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}
