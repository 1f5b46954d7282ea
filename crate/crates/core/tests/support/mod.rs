#![allow(dead_code)]

pub mod oracle;

use chrono::NaiveDate;
use specmargin_core::garch::business_days;
use specmargin_core::rng::NormalStream;
use specmargin_core::timeseries::ReturnSeries;

pub fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 3).unwrap()
}

/// Weekday-dated return series.
pub fn series(values: Vec<f64>) -> ReturnSeries {
    ReturnSeries::new(business_days(start(), values.len()), values).unwrap()
}

pub fn normals(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = NormalStream::new(seed, 0);
    (0..n).map(|_| rng.next_normal()).collect()
}

/// Fraction of `p_values` below 5%.
pub fn rejection_rate(p_values: &[f64]) -> f64 {
    p_values.iter().filter(|&&p| p < 0.05).count() as f64 / p_values.len() as f64
}
