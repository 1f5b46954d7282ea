mod support;

use chrono::NaiveDate;
use proptest::prelude::*;
use specmargin_core::garch::{simulate, GarchParams, VarianceSource};
use specmargin_core::timeseries::{arch_lm, ljung_box, log_returns, summarize, PriceSeries};
use specmargin_core::Error;
use support::{normals, rejection_rate, start};

fn prices(values: &[f64]) -> PriceSeries {
    let dates = specmargin_core::garch::business_days(start(), values.len());
    PriceSeries::new(dates.into_iter().zip(values.iter().copied()).collect()).unwrap()
}

#[test]
fn log_return_examples() {
    assert_eq!(log_returns(&prices(&[100.0, 100.0])).values(), &[0.0]);
    let r = log_returns(&prices(&[100.0, 100.0 * 0.01f64.exp()])).values()[0];
    assert!((r - 1.0).abs() < 1e-12);
    let r = log_returns(&prices(&[100.0, 90.0])).values()[0];
    assert!((r - -10.536_051_565_782_63).abs() < 1e-9);
}

#[test]
fn three_prices_two_returns() {
    let p = prices(&[100.0, 101.0, 100.0]);
    assert_eq!(p.len(), 3);
    let r = log_returns(&p);
    assert_eq!(r.len(), 2);
    assert_eq!(r.dates(), &p.dates()[1..]);
}

#[test]
fn rejects_bad_prices() {
    let d = |i| NaiveDate::from_ymd_opt(2001, 1, i).unwrap();
    assert!(PriceSeries::new(vec![(d(1), 100.0), (d(2), -5.0)]).is_err());
    assert!(PriceSeries::new(vec![(d(1), 100.0), (d(1), 101.0)]).is_err());
    assert!(PriceSeries::new(vec![(d(1), 100.0)]).is_err());
}

#[test]
fn summary_of_normals() {
    let s = summarize(&normals(7, 10_000)).unwrap();
    assert!(s.mean.abs() < 0.05, "mean {}", s.mean);
    assert!((s.kurtosis.unwrap() - 3.0).abs() < 0.2, "kurtosis {:?}", s.kurtosis);
    assert!(s.minimum <= s.mean && s.mean <= s.maximum);
}

#[test]
fn summary_small_cases() {
    let s = summarize(&[2.5; 6]).unwrap();
    assert_eq!(s.std_dev, 0.0);
    assert!(s.skewness.is_none() && s.kurtosis.is_none());

    let s = summarize(&[-1.0, 0.0, 1.0, 0.0]).unwrap();
    assert_eq!((s.mean, s.minimum, s.maximum), (0.0, -1.0, 1.0));
    assert!(matches!(summarize(&[1.0, 2.0, 3.0]), Err(Error::InsufficientData { .. })));
}

#[test]
fn ljung_box_size_on_iid_noise() {
    // 2000 runs rather than 200: the 200-run rate has a binomial sd near 0.016
    let p: Vec<f64> = (0..2000).map(|seed| ljung_box(&normals(seed, 2000), 12).unwrap().p_value).collect();
    let rate = rejection_rate(&p);
    assert!((0.02..=0.09).contains(&rate), "rejection rate {rate}");
}

#[test]
fn ljung_box_detects_persistence() {
    // a random walk is as close to x_t = x_{t-1} as a non-constant series gets
    let mut level = 0.0;
    let walk: Vec<f64> = normals(3, 500).into_iter().map(|e| {
        level += e;
        level
    }).collect();
    assert!(ljung_box(&walk, 12).unwrap().p_value < 1e-10);
    assert!(matches!(ljung_box(&[1.0; 50], 12), Err(Error::Degenerate(_))));
}

#[test]
fn arch_lm_size_on_iid_noise() {
    let p: Vec<f64> = (0..2000).map(|seed| arch_lm(&normals(seed, 2000), 12).unwrap().p_value).collect();
    let rate = rejection_rate(&p);
    assert!((0.02..=0.09).contains(&rate), "rejection rate {rate}");
}

#[test]
fn arch_lm_power_on_garch_data() {
    let params = GarchParams::new(0.0, 0.05, 0.1, 0.85).unwrap();
    let hits = (0..100)
        .filter(|&seed| {
            let x = simulate(&params, 2000, seed, VarianceSource::Returns);
            arch_lm(&x, 12).unwrap().p_value < 0.01
        })
        .count();
    assert!(hits >= 95, "{hits}/100 runs rejected");
}

#[test]
fn arch_lm_constant_input_is_degenerate() {
    assert!(matches!(arch_lm(&[0.7; 100], 12), Err(Error::Degenerate(_))));
}

#[test]
fn lag_preconditions() {
    assert!(ljung_box(&[1.0, 2.0, 3.0], 0).is_err());
    assert!(ljung_box(&[1.0, 2.0, 3.0], 2).is_err());
    assert!(arch_lm(&normals(1, 13), 12).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn returns_ignore_price_scale(
        raw in prop::collection::vec(1.0f64..1000.0, 2..40),
        c in 0.01f64..100.0,
    ) {
        let a = log_returns(&prices(&raw));
        let scaled: Vec<f64> = raw.iter().map(|p| p * c).collect();
        let b = log_returns(&prices(&scaled));
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() < 1e-12 * x.abs().max(1.0) * 100.0);
        }
    }

    #[test]
    fn summary_is_order_free(xs in prop::collection::vec(-50.0f64..50.0, 4..60)) {
        let a = summarize(&xs).unwrap();
        let rev: Vec<f64> = xs.iter().rev().copied().collect();
        let b = summarize(&rev).unwrap();
        prop_assert!((a.mean - b.mean).abs() < 1e-12);
        prop_assert!((a.std_dev - b.std_dev).abs() < 1e-10);
        prop_assert_eq!((a.minimum, a.maximum), (b.minimum, b.maximum));
        if let (Some(s1), Some(s2)) = (a.skewness, b.skewness) {
            prop_assert!((s1 - s2).abs() < 1e-8);
        }
    }

    #[test]
    fn ljung_box_affine_invariant(seed in 0u64..1000, a in -10.0f64..10.0, b in 0.1f64..10.0, neg: bool) {
        let x = normals(seed, 300);
        let b = if neg { -b } else { b };
        let y: Vec<f64> = x.iter().map(|v| a + b * v).collect();
        let q1 = ljung_box(&x, 12).unwrap().statistic;
        let q2 = ljung_box(&y, 12).unwrap().statistic;
        prop_assert!((q1 - q2).abs() < 1e-9 * q1.max(1.0));
    }

    #[test]
    fn p_value_decreases_in_statistic(seed in 0u64..1000) {
        let x = normals(seed, 200);
        let y: Vec<f64> = x.windows(2).map(|w| w[0] + w[1]).collect();
        let (a, b) = (ljung_box(&x, 12).unwrap(), ljung_box(&y, 12).unwrap());
        prop_assert!((0.0..=1.0).contains(&a.p_value) && (0.0..=1.0).contains(&b.p_value));
        if a.statistic < b.statistic {
            prop_assert!(a.p_value >= b.p_value);
        } else {
            prop_assert!(a.p_value <= b.p_value);
        }
    }
}
