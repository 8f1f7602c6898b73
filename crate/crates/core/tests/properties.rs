mod common;

use breadth_granger::breadth::{daily_breadth, diff_series};
use breadth_granger::granger::granger_test;
use breadth_granger::ingest::{align, market_return_series, AlignedFrame, PriceBar, PricePanel, TimeSeries};
use breadth_granger::simulate::{business_days, frame_from_columns, rng};
use breadth_granger::stats::{aic_var, f_cdf, f_sf, ols_fit, DesignMatrix};
use breadth_granger::var::{build_lag_matrix, fit_var, CoefBlock};
use chrono::NaiveDate;
use common::{panel_from_grid, rational_normal_equations};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2012, 3, 1).unwrap()
}

/// A series over a 30-weekday calendar, keeping only the flagged dates.
fn sparse_series(name: &str, keep: &[bool], values: &[f64]) -> TimeSeries {
    let days = business_days(start(), keep.len());
    let points = days
        .iter()
        .zip(keep)
        .zip(values)
        .filter(|((_, k), _)| **k)
        .map(|((d, _), v)| (*d, Some(*v)))
        .collect();
    TimeSeries::new(name, points).unwrap()
}

fn design_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (1usize..=5).prop_flat_map(|k| {
        (k + 3..=50).prop_flat_map(move |t| {
            (
                prop::collection::vec(prop::collection::vec(-10.0f64..10.0, k - 1), t),
                prop::collection::vec(-50.0f64..50.0, t),
            )
                .prop_map(|(rest, y)| {
                    let x = rest
                        .into_iter()
                        .map(|r| std::iter::once(1.0).chain(r).collect())
                        .collect();
                    (x, y)
                })
        })
    })
}

fn noise_frame(seed: u64, n: usize) -> AlignedFrame {
    let mut rng = rng(seed);
    let mut col = || (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect::<Vec<_>>();
    let a = col();
    let b = col();
    frame_from_columns(vec![("A".into(), a), ("B".into(), b)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn align_is_idempotent(keep_a in prop::collection::vec(prop::bool::weighted(0.8), 30),
                           keep_b in prop::collection::vec(prop::bool::weighted(0.8), 30),
                           v in prop::collection::vec(-5.0f64..5.0, 30)) {
        let a = sparse_series("A", &keep_a, &v);
        let b = sparse_series("B", &keep_b, &v);
        if let Ok(frame) = align(&[&a, &b]) {
            let cols = frame.to_series();
            let again = align(&cols.iter().collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(again, frame);
        }
    }

    #[test]
    fn align_dates_ignore_series_order(keep_a in prop::collection::vec(prop::bool::weighted(0.7), 30),
                                       keep_b in prop::collection::vec(prop::bool::weighted(0.7), 30),
                                       keep_c in prop::collection::vec(prop::bool::weighted(0.7), 30),
                                       v in prop::collection::vec(-5.0f64..5.0, 30)) {
        let (a, b, c) = (sparse_series("A", &keep_a, &v), sparse_series("B", &keep_b, &v), sparse_series("C", &keep_c, &v));
        let abc = align(&[&a, &b, &c]);
        let cab = align(&[&c, &a, &b]);
        match (abc, cab) {
            (Ok(x), Ok(y)) => {
                prop_assert_eq!(x.dates(), y.dates());
                prop_assert_eq!(x.column_by_name("B"), y.column_by_name("B"));
                prop_assert_eq!(y.names(), &["C".to_string(), "A".into(), "B".into()][..]);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "one order aligned, the other did not"),
        }
    }

    #[test]
    fn returns_span_the_calendar(closes in prop::collection::vec(prop::collection::vec(prop::option::weighted(0.9, 1.0f64..100.0), 8), 2..6),
                                 index in prop::collection::vec(100.0f64..200.0, 8),
                                 c in 0.01f64..1000.0) {
        let volumes = vec![vec![1u64; 8]; closes.len()];
        let panel = panel_from_grid(&closes, &volumes);
        let days = panel.calendar().to_vec();
        prop_assume!(days.len() >= 2);
        let idx = TimeSeries::from_values("IDX", &days, &index[..days.len()]).unwrap();
        let r = market_return_series(&panel, Some(&idx)).unwrap();
        prop_assert_eq!(r.len(), days.len());
        prop_assert!(r.points()[0].1.is_none());
        prop_assert_eq!(r.defined_count(), days.len() - 1);

        let scaled_idx = TimeSeries::from_values("IDX", &days, &index[..days.len()].iter().map(|v| v * c).collect::<Vec<_>>()).unwrap();
        let rs = market_return_series(&panel, Some(&scaled_idx)).unwrap();
        for (p, q) in r.points().iter().zip(rs.points()) {
            if let (Some(x), Some(y)) = (p.1, q.1) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn relabeling_tickers_keeps_breadth(closes in prop::collection::vec(prop::collection::vec((10u32..30).prop_map(|c| f64::from(c) / 10.0), 6), 2..7),
                                        vols in prop::collection::vec(1u64..1000, 6)) {
        let bars = |name: &dyn Fn(usize) -> String| -> PricePanel {
            let days = business_days(start(), 6);
            let mut out = Vec::new();
            for (i, row) in closes.iter().enumerate() {
                for (d, c) in row.iter().enumerate() {
                    out.push(PriceBar { ticker: name(i), date: days[d], close: *c, volume: vols[d] * (i as u64 + 1) });
                }
            }
            PricePanel::new("M", out).unwrap()
        };
        let n = closes.len();
        let original = daily_breadth(&bars(&|i| format!("T{i}"))).unwrap();
        let relabeled = daily_breadth(&bars(&|i| format!("Z{}", n - i))).unwrap();
        prop_assert_eq!(original, relabeled);
    }

    #[test]
    fn diff_drops_one_value(v in prop::collection::vec(-1e3f64..1e3, 2..40)) {
        let days = business_days(start(), v.len());
        let s = TimeSeries::from_values("S", &days, &v).unwrap();
        prop_assert_eq!(diff_series(&s).unwrap().defined_count(), v.len() - 1);
    }

    #[test]
    fn ols_residuals_are_orthogonal((x, y) in design_strategy()) {
        let design = DesignMatrix::from_rows(&x).unwrap();
        let Ok(fit) = ols_fit(&design, &y) else { return Ok(()) };
        for j in 0..x[0].len() {
            let norm = x.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt();
            let dot: f64 = x.iter().zip(&fit.residuals).map(|(r, e)| r[j] * e).sum();
            prop_assert!((dot / norm).abs() <= 1e-8, "column {j}: {dot}");
        }
        let mean = fit.residuals.iter().sum::<f64>() / fit.residuals.len() as f64;
        prop_assert!(mean.abs() <= 1e-10);
        for ((t, c), s) in fit.tstats.iter().zip(&fit.coefs).zip(&fit.se) {
            if *s > 0.0 {
                prop_assert!((t * s - c).abs() <= 1e-9 * c.abs().max(1.0));
            }
        }
    }

    #[test]
    fn ols_matches_exact_normal_equations((x, y) in design_strategy()) {
        let design = DesignMatrix::from_rows(&x).unwrap();
        let Ok(fit) = ols_fit(&design, &y) else { return Ok(()) };
        prop_assume!(fit.condition < 1e6);
        let want = rational_normal_equations(&x, &y);
        let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (g, w) in fit.coefs.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-8 * scale, "{g} vs {w}");
        }
    }

    #[test]
    fn f_cdf_is_a_distribution_function(x in 0.0f64..50.0, dx in 0.0f64..5.0, d1 in 1usize..40, d2 in 1usize..400) {
        let (a, b) = (f_cdf(x, d1, d2), f_cdf(x + dx, d1, d2));
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a);
        // statrs evaluates the tail through its own incomplete beta.
        let tail = FisherSnedecor::new(d1 as f64, d2 as f64).unwrap().sf(x);
        prop_assert!((a + tail - 1.0).abs() <= 1e-9);
        prop_assert!((a + f_sf(x, d1, d2) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn aic_falls_with_sample_size(ld in -10.0f64..10.0, t in 20usize..5000, k in 1usize..5, p in 1usize..8) {
        prop_assert!(aic_var(ld, t + 1, k, p) < aic_var(ld, t, k, p));
    }

    #[test]
    fn coef_block_round_trips(v in prop::collection::vec(-3.0f64..3.0, 1 + 2 * 3), w in prop::collection::vec(-3.0f64..3.0, 1 + 2 * 3)) {
        let rows = vec![v, w];
        prop_assert_eq!(CoefBlock::from_flat(&rows, 3).unwrap().flatten(), rows);
    }

    #[test]
    fn var_is_ols_per_equation(seed in any::<u64>(), p in 1usize..4) {
        let frame = noise_frame(seed, 80);
        let fit = fit_var(&frame, p).unwrap();
        let lags = build_lag_matrix(&frame, p).unwrap();
        let flat = fit.coefs.flatten();
        for (j, row) in flat.iter().enumerate() {
            let single = ols_fit(&lags.x, &lags.response(j)).unwrap();
            for (a, b) in row.iter().zip(&single.coefs) {
                prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sigma_follows_column_permutation(seed in any::<u64>(), p in 1usize..3) {
        let frame = noise_frame(seed, 80);
        let swapped = frame.select(&[1, 0]).unwrap();
        let back = swapped.select(&[1, 0]).unwrap();
        let (s, t, u) = (fit_var(&frame, p).unwrap().sigma, fit_var(&swapped, p).unwrap().sigma, fit_var(&back, p).unwrap().sigma);
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((s[i][j] - u[i][j]).abs() <= 1e-12 * s[i][i].max(1e-300));
                prop_assert!((s[i][j] - t[1 - i][1 - j]).abs() <= 1e-9 * s[i][i].sqrt() * s[j][j].sqrt());
            }
        }
        // PSD: 2×2 symmetric with non-negative diagonal and determinant.
        prop_assert!(s[0][0] >= 0.0 && s[0][0] * s[1][1] - s[0][1] * s[1][0] >= -1e-10);
    }

    #[test]
    fn granger_is_nested_and_scale_free(seed in any::<u64>(), p in 1usize..4, c in 0.01f64..100.0) {
        let frame = noise_frame(seed, 60);
        let base = granger_test(&frame, "A", "B", p).unwrap();
        prop_assert!(base.rss_restricted >= base.rss_unrestricted - 1e-10);
        prop_assert_eq!(base.t_eff, frame.rows() - p);
        prop_assert_eq!(base.df_den, base.t_eff - 2 * p - 1);
        for scaled_col in [0usize, 1] {
            let cols = (0..2)
                .map(|i| {
                    let k = if i == scaled_col { c } else { 1.0 };
                    (frame.names()[i].clone(), frame.column(i).iter().map(|x| x * k).collect())
                })
                .collect();
            let scaled = frame_from_columns(cols).unwrap();
            let r = granger_test(&scaled, "A", "B", p).unwrap();
            let (f0, f1) = (base.f_stat.value().unwrap(), r.f_stat.value().unwrap());
            prop_assert!((f0 - f1).abs() <= 1e-9 * f0.max(1e-12), "F {f0} vs {f1}");
            prop_assert!((base.p_value - r.p_value).abs() <= 1e-9 * base.p_value.max(1e-300));
        }
    }

    #[test]
    fn larger_f_means_smaller_p(f in 0.0f64..30.0, df in 0.01f64..5.0, d1 in 1usize..6, d2 in 5usize..500) {
        prop_assert!(f_sf(f + df, d1, d2) <= f_sf(f, d1, d2));
    }
}
