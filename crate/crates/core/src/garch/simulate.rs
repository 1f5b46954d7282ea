use alloc::vec::Vec;

use chrono::{Datelike, NaiveDate, Weekday};
#[allow(unused_imports)]
use num_traits::Float;

use super::{GarchParams, VarianceSource};
use crate::rng::NormalStream;
use crate::timeseries::PriceSeries;
use crate::Result;

const BURN_IN: usize = 500;

/// Simulates `n` percent returns from the model after a burn-in period.
pub fn simulate(params: &GarchParams, n: usize, seed: u64, source: VarianceSource) -> Vec<f64> {
    let mut noise = NormalStream::new(seed, 0);
    let mut var = params.unconditional_variance();
    let (mut prev_r, mut prev_mu) = (0.0, 0.0);
    let mut out = Vec::with_capacity(n);
    for t in 0..n + BURN_IN {
        let shock = match source {
            VarianceSource::Returns => prev_r,
            VarianceSource::Residuals => prev_r - prev_mu,
        };
        if t > 0 {
            var = params.omega + params.alpha * shock * shock + params.beta * var;
        }
        let mu = params.rho * prev_r;
        let r = mu + var.sqrt() * noise.next_normal();
        if t >= BURN_IN {
            out.push(r);
        }
        prev_r = r;
        prev_mu = mu;
    }
    out
}

/// `n` consecutive weekdays starting at `start` (or the next weekday).
pub fn business_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut day = start;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        if !matches!(day.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(day);
        }
        day = day.succ_opt().expect("date overflow");
    }
    out
}

/// Integrates percent log returns into a weekday price path starting at
/// `start_price`, giving `returns.len() + 1` prices.
pub fn synthetic_prices(returns: &[f64], start: NaiveDate, start_price: f64) -> Result<PriceSeries> {
    let dates = business_days(start, returns.len() + 1);
    let mut log_price = start_price.ln();
    let mut rows = Vec::with_capacity(dates.len());
    rows.push((dates[0], start_price));
    for (r, &d) in returns.iter().zip(&dates[1..]) {
        log_price += r / 100.0;
        rows.push((d, log_price.exp()));
    }
    PriceSeries::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::log_returns;

    #[test]
    fn prices_round_trip_returns() {
        let p = GarchParams::new(0.0, 0.1, 0.1, 0.85).unwrap();
        let r = simulate(&p, 50, 3, VarianceSource::Returns);
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
        let prices = synthetic_prices(&r, start, 1000.0).unwrap();
        assert_eq!(prices.len(), 51);
        let back = log_returns(&prices);
        for (a, b) in back.values().iter().zip(&r) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(prices.dates().iter().all(|d| d.weekday().number_from_monday() <= 5));
    }

    #[test]
    fn deterministic_by_seed() {
        let p = GarchParams::new(0.1, 0.1, 0.1, 0.85).unwrap();
        assert_eq!(
            simulate(&p, 20, 9, VarianceSource::Returns),
            simulate(&p, 20, 9, VarianceSource::Returns)
        );
        assert_ne!(
            simulate(&p, 20, 9, VarianceSource::Returns),
            simulate(&p, 20, 10, VarianceSource::Returns)
        );
    }
}
