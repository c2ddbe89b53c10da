use chrono::NaiveDate;
use proptest::prelude::*;
use shocklab_core::detector::ShockRecord;
use shocklab_core::laws::{
    displaced_curves, displaced_curves_at, fit_bath_proportional, fit_omori, productivity, ResponseCurve, Side,
};
use shocklab_core::series::{
    compute_volatility, exceedance_panel, normalize_and_detrend, GridDay, HalfDayCalendar, MinuteGrid,
    NormalizedVolatility, SymbolDay, VolDay, VolatilityPanel,
};
use shocklab_core::synth::{apply_permutation, intraday_permutation, shuffle_intraday};

fn date(d: u64) -> NaiveDate {
    NaiveDate::from_ymd_opt(2002, 3, 4).unwrap() + chrono::Days::new(d)
}

/// Prices from signed log returns, one vector per (day, symbol).
fn grid(returns: &[Vec<Vec<f64>>]) -> MinuteGrid<f64> {
    let symbols = returns[0].len();
    let days = returns
        .iter()
        .enumerate()
        .map(|(d, day)| GridDay {
            date: date(d as u64),
            minutes: day[0].len() + 1,
            symbols: day
                .iter()
                .map(|r| {
                    let mut p = vec![100.0];
                    for x in r {
                        p.push(p.last().unwrap() * x.exp());
                    }
                    Some(SymbolDay { prices: p, trades: None })
                })
                .collect(),
        })
        .collect();
    MinuteGrid::new((0..symbols).map(|j| format!("S{j}")).collect(), days).unwrap()
}

fn signed_return() -> impl Strategy<Value = f64> {
    (1e-4f64..0.05, any::<bool>()).prop_map(|(m, up)| if up { m } else { -m })
}

fn returns() -> impl Strategy<Value = Vec<Vec<Vec<f64>>>> {
    (2usize..5, 1usize..5, 5usize..30).prop_flat_map(|(d, s, m)| {
        prop::collection::vec(prop::collection::vec(prop::collection::vec(signed_return(), m), s), d)
    })
}

fn nv_from(values: Vec<Vec<Vec<f64>>>) -> NormalizedVolatility<f64> {
    let symbols = values[0].len();
    let samples = values[0][0].len();
    NormalizedVolatility {
        panel: VolatilityPanel {
            step: 1,
            symbols: (0..symbols).map(|j| format!("S{j}")).collect(),
            days: values
                .into_iter()
                .enumerate()
                .map(|(d, day)| VolDay {
                    date: date(d as u64),
                    samples,
                    half_day: false,
                    series: day.into_iter().map(Some).collect(),
                })
                .collect(),
        },
        sigma_full: vec![1.0; symbols],
        pattern: vec![1.0; samples],
        dropped: Vec::new(),
    }
}

fn values() -> impl Strategy<Value = Vec<Vec<Vec<f64>>>> {
    (1usize..4, 1usize..6, 2usize..40).prop_flat_map(|(d, s, m)| {
        prop::collection::vec(prop::collection::vec(prop::collection::vec(0.0f64..8.0, m), s), d)
    })
}

proptest! {
    #[test]
    fn detrended_minute_mean_is_one(r in returns()) {
        let raw = compute_volatility(&grid(&r), 1).unwrap();
        let nv = normalize_and_detrend(&raw, &HalfDayCalendar::default()).unwrap();
        for m in nv.full_day_minute_means().iter().skip(1) {
            prop_assert!((m - 1.0).abs() <= 1e-9, "{}", m);
        }
    }

    #[test]
    fn omori_identity_holds(rate in prop::collection::vec(0.0f64..1.0, 30..120)) {
        let h = (rate.len() - 2) / 2;
        let (b, a) = displaced_curves_at(&rate, h + 1, h, 1).unwrap();
        for c in [&b, &a] {
            prop_assert!(c.cumulative.windows(2).all(|w| w[1] >= w[0]));
            prop_assert!(c.tau.windows(2).all(|w| w[1] > w[0]));
            prop_assert_eq!(*c.tau.last().unwrap(), h);
            if let Some(f) = fit_omori(c) {
                prop_assert!((f.alpha - f.beta * (1.0 - f.omega)).abs() <= 1e-12 * f.alpha.abs().max(1.0));
            }
            prop_assert_eq!(productivity(c), *c.cumulative.last().unwrap());
        }
    }

    #[test]
    fn productivity_is_count_within_horizon(
        rate in prop::collection::vec(prop::sample::select(vec![0.0, 1.0]), 200..260),
        step in prop::sample::select(vec![1usize, 5]),
    ) {
        let center = 100;
        let rec = ShockRecord {
            date: date(0),
            step,
            t_c: Some(center * step),
            x_peak: Some(2.0),
            cascade: vec![center * step],
            weight: 2.0,
            accepted: true,
            reason: None,
        };
        let horizon = 90 / step * step;
        let (b, a) = displaced_curves(&rate, &rec, horizon).unwrap();
        let h = horizon / step;
        let after: f64 = rate[center + 1..=center + h].iter().sum();
        let before: f64 = rate[center - h..center].iter().sum();
        prop_assert_eq!(productivity(&a), after);
        prop_assert_eq!(productivity(&b), before);
    }

    #[test]
    fn bath_exponent_is_log_ratio_and_scale_free(
        rows in prop::collection::vec((0.5f64..50.0, 0.1f64..40.0), 30..80),
        scale in 0.01f64..100.0,
    ) {
        let f = fit_bath_proportional(&rows).unwrap();
        prop_assert!((f.b + f.c_b.log10()).abs() <= 1e-12);
        let scaled: Vec<(f64, f64)> = rows.iter().map(|&(a, b)| (a * scale, b * scale)).collect();
        let g = fit_bath_proportional(&scaled).unwrap();
        prop_assert!((g.c_b - f.c_b).abs() <= 1e-9 * f.c_b);
    }

    #[test]
    fn shuffle_keeps_each_symbol_day_multiset(v in values(), seed in any::<u64>()) {
        let nv = nv_from(v);
        let sh = shuffle_intraday(&nv, seed);
        for (a, b) in nv.panel.days.iter().zip(&sh.panel.days) {
            for (x, y) in a.series.iter().zip(&b.series) {
                let mut x = x.clone().unwrap();
                let mut y = y.clone().unwrap();
                prop_assert_eq!(x[0], y[0]);
                x.sort_by(f64::total_cmp);
                y.sort_by(f64::total_cmp);
                prop_assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn shuffle_commutes_with_thresholding(v in values(), seed in any::<u64>(), q in 0.5f64..6.0) {
        let nv = nv_from(v);
        let ex_then = exceedance_panel(&nv, q).unwrap();
        let ex_sh = exceedance_panel(&shuffle_intraday(&nv, seed), q).unwrap();
        for (d, (a, b)) in ex_then.days.iter().zip(&ex_sh.days).enumerate() {
            for (j, (x, y)) in a.indicators.iter().zip(&b.indicators).enumerate() {
                let x = x.as_ref().unwrap();
                let perm = intraday_permutation(seed, d, j, x.len());
                prop_assert_eq!(&apply_permutation(x, &perm), y.as_ref().unwrap());
            }
        }
    }

    #[test]
    fn market_curve_is_mean_of_stock_curves(v in values(), q in 0.5f64..6.0) {
        let nv = nv_from(v);
        let ex = exceedance_panel(&nv, q).unwrap();
        let day = &ex.days[0];
        let len = day.rate.len();
        prop_assume!(len >= 5);
        let h = (len - 2) / 2;
        let (_, market) = displaced_curves_at(&day.rate, h + 1, h, 1).unwrap();
        let mut mean = vec![0.0; h];
        for j in 0..ex.symbols.len() {
            let s = ex.symbol_rate(0, j).unwrap();
            let (_, c) = displaced_curves_at(&s, h + 1, h, 1).unwrap();
            for (m, x) in mean.iter_mut().zip(&c.cumulative) {
                *m += x / ex.symbols.len() as f64;
            }
        }
        for (a, b) in market.cumulative.iter().zip(&mean) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn exact_power_law_curve_round_trips_in_f32() {
    let tau: Vec<usize> = (1..=90).collect();
    let c = ResponseCurve::<f32> {
        side: Side::After,
        cumulative: tau.iter().map(|&t| 0.3 * (t as f32).powf(0.68)).collect(),
        tau,
        horizon: 90,
    };
    let f = fit_omori(&c).unwrap();
    assert!((f.omega - 0.32).abs() < 1e-4);
    assert!((f.alpha - 0.3 * 0.68).abs() < 1e-4);
}
