//! Fixed number formatting for emitted tables.

use crate::granger::FStat;

/// Four decimals, with negative zero printed as `0.0000`.
pub fn fixed4(x: f64) -> String {
    if x.is_nan() {
        return "n/a".into();
    }
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// `2E-05` style below 1e-4, four decimals otherwise.
pub fn p_value(p: f64) -> String {
    if p.is_nan() {
        return "n/a".into();
    }
    if p == 0.0 {
        return "0".into();
    }
    if p >= 1e-4 {
        return fixed4(p);
    }
    let sci = format!("{p:.0e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < 0 {
        format!("{mantissa}E-{:02}", -exponent)
    } else {
        format!("{mantissa}E+{exponent:02}")
    }
}

pub fn f_stat(f: FStat) -> String {
    match f {
        FStat::Value(v) => fixed4(v),
        FStat::PerfectFit => "perfect fit".into(),
    }
}

/// `coef (t)`, suffixed with `*` when significant at 5%.
pub fn coef_cell(coef: f64, tstat: f64, significant: bool) -> String {
    let marker = if significant { "*" } else { "" };
    format!("{} ({}){marker}", fixed4(coef), fixed4(tstat))
}

/// Shortest round-trip representation, shared by JSON and CSV output.
pub fn raw(x: f64) -> String {
    serde_json::to_string(&x).expect("f64 serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_values() {
        assert_eq!(p_value(1.2e-159), "1E-159");
        assert_eq!(p_value(2.2e-5), "2E-05");
        assert_eq!(p_value(9.6e-5), "1E-04");
        assert_eq!(p_value(0.83281), "0.8328");
        assert_eq!(p_value(1e-4), "0.0001");
        assert_eq!(p_value(0.0), "0");
        assert_eq!(p_value(1.0), "1.0000");
    }

    #[test]
    fn coefficient_cells() {
        assert_eq!(coef_cell(0.0369, 1.8825, false), "0.0369 (1.8825)");
        assert_eq!(coef_cell(0.0371, 2.1752, true), "0.0371 (2.1752)*");
        assert_eq!(coef_cell(-0.0, 0.0, false), "0.0000 (0.0000)");
        assert_eq!(coef_cell(-4.99e-5, -0.9606, false), "0.0000 (-0.9606)");
    }

    #[test]
    fn f_stats() {
        assert_eq!(f_stat(FStat::Value(12.345_67)), "12.3457");
        assert_eq!(f_stat(FStat::PerfectFit), "perfect fit");
    }

    #[test]
    fn raw_matches_json() {
        assert_eq!(raw(0.1), "0.1");
        assert_eq!(raw(1e-159), "1e-159");
    }
}
