//! Daily price ingestion, percent log returns and the descriptive and
//! dependence statistics reported for each contract.

use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use chrono::NaiveDate;
#[allow(unused_imports)]
use num_traits::Float;

use crate::special::chi_square_sf;
use crate::stats;
use crate::{Error, Result};

pub const DEFAULT_LAG: usize = 12;

/// End-of-day prices in strictly increasing date order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    /// Validates and sorts raw rows. Row numbers in errors are 1-based
    /// positions in `rows`.
    pub fn new(rows: Vec<(NaiveDate, f64)>) -> Result<Self> {
        for (i, &(_, price)) in rows.iter().enumerate() {
            if !price.is_finite() || price <= 0.0 {
                return Err(Error::InvalidRow {
                    row: i + 1,
                    reason: format!("price {price} is not a positive number"),
                });
            }
        }
        if rows.len() < 2 {
            return Err(Error::InsufficientData { needed: 2, got: rows.len() });
        }
        let mut rows = rows;
        rows.sort_by_key(|&(d, _)| d);
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateDate(w[0].0));
        }
        let (dates, prices) = rows.into_iter().unzip();
        Ok(Self { dates, prices })
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.prices.iter().copied())
    }
}

/// Daily returns in percent, `100 * ln(p_t / p_{t-1})`, dated by the later day.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReturnSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} dates for {} returns",
                dates.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidRow { row: i + 1, reason: "return is not finite".into() });
        }
        if let Some(i) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRow {
                row: i + 2,
                reason: format!("date {} does not follow {}", dates[i + 1], dates[i]),
            });
        }
        Ok(Self { dates, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slice(&self, range: Range<usize>) -> Self {
        Self { dates: self.dates[range.clone()].to_vec(), values: self.values[range].to_vec() }
    }

    /// Same dates, every return multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { dates: self.dates.clone(), values: self.values.iter().map(|v| v * factor).collect() }
    }

    pub fn position(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }
}

pub fn log_returns(prices: &PriceSeries) -> ReturnSeries {
    let p = prices.prices();
    let values = p.windows(2).map(|w| 100.0 * (w[1].ln() - w[0].ln())).collect();
    ReturnSeries { dates: prices.dates()[1..].to_vec(), values }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    /// `None` when the series has zero variance.
    pub skewness: Option<f64>,
    /// Non-excess; `None` when the series has zero variance.
    pub kurtosis: Option<f64>,
    pub minimum: f64,
    pub maximum: f64,
}

pub fn summarize(series: &[f64]) -> Result<SummaryStats> {
    if series.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: series.len() });
    }
    let (minimum, maximum) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let mean = stats::mean(series);
    Ok(SummaryStats {
        n: series.len(),
        // rounding can push the mean of a constant series a hair past its bounds
        mean: mean.clamp(minimum, maximum),
        std_dev: stats::sample_std(series),
        skewness: stats::skewness(series),
        kurtosis: stats::kurtosis(series),
        minimum,
        maximum,
    })
}

/// Statistic and chi-square p-value of a portmanteau-style test.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DependenceReport {
    pub lag: usize,
    pub ljung_box_returns: TestResult,
    pub ljung_box_squared: TestResult,
    pub arch_lm: TestResult,
}

pub fn dependence(series: &[f64], lag: usize) -> Result<DependenceReport> {
    let squared: Vec<f64> = series.iter().map(|x| x * x).collect();
    Ok(DependenceReport {
        lag,
        ljung_box_returns: ljung_box(series, lag)?,
        ljung_box_squared: ljung_box(&squared, lag)?,
        arch_lm: arch_lm(series, lag)?,
    })
}

fn check_lag(len: usize, lag: usize) -> Result<()> {
    if lag == 0 {
        return Err(Error::InvalidParameter("lag must be at least 1".into()));
    }
    if len <= lag + 1 {
        return Err(Error::InsufficientData { needed: lag + 2, got: len });
    }
    Ok(())
}

/// Ljung-Box `Q = n(n+2) sum_j r_j^2 / (n-j)` against chi-square(`lag`).
pub fn ljung_box(series: &[f64], lag: usize) -> Result<TestResult> {
    check_lag(series.len(), lag)?;
    let n = series.len();
    let m = stats::mean(series);
    let centered: Vec<f64> = series.iter().map(|x| x - m).collect();
    let denom: f64 = centered.iter().map(|d| d * d).sum();
    if !stats::has_variation(series) {
        return Err(Error::Degenerate("autocorrelations of a constant series are undefined"));
    }
    let nf = n as f64;
    let q = (1..=lag)
        .map(|j| {
            let r = centered[j..].iter().zip(&centered).map(|(a, b)| a * b).sum::<f64>() / denom;
            r * r / (nf - j as f64)
        })
        .sum::<f64>()
        * nf
        * (nf + 2.0);
    Ok(TestResult { statistic: q, p_value: chi_square_sf(q, lag as f64) })
}

/// Engle's LM test: regress squared demeaned values on a constant and `lag`
/// of their own lags; `n_eff * R^2` against chi-square(`lag`).
pub fn arch_lm(series: &[f64], lag: usize) -> Result<TestResult> {
    check_lag(series.len(), lag)?;
    let m = stats::mean(series);
    let e2: Vec<f64> = series.iter().map(|x| (x - m) * (x - m)).collect();
    let k = lag + 1;
    let n_eff = e2.len() - lag;

    let regressors = |t: usize, out: &mut [f64]| {
        out[0] = 1.0;
        for j in 1..=lag {
            out[j] = e2[t - j];
        }
    };

    let mut xtx = alloc::vec![0.0; k * k];
    let mut xty = alloc::vec![0.0; k];
    let mut row = alloc::vec![0.0; k];
    for t in lag..e2.len() {
        regressors(t, &mut row);
        for a in 0..k {
            xty[a] += row[a] * e2[t];
            for b in 0..=a {
                xtx[a * k + b] += row[a] * row[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            xtx[b * k + a] = xtx[a * k + b];
        }
    }
    let y = &e2[lag..];
    let y_mean = stats::mean(y);
    let sst: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    if !(sst > 0.0) {
        return Err(Error::Degenerate("squared series has no variation"));
    }
    let beta = solve_spd(&mut xtx, &xty, k)
        .ok_or(Error::Degenerate("ARCH regression design matrix is singular"))?;
    let mut ssr = 0.0;
    for t in lag..e2.len() {
        regressors(t, &mut row);
        let fitted: f64 = row.iter().zip(&beta).map(|(x, b)| x * b).sum();
        ssr += (e2[t] - fitted) * (e2[t] - fitted);
    }
    let r2 = (1.0 - ssr / sst).max(0.0);
    let statistic = n_eff as f64 * r2;
    Ok(TestResult { statistic, p_value: chi_square_sf(statistic, lag as f64) })
}

// Cholesky solve of a symmetric positive-definite system, row-major `k x k`.
fn solve_spd(a: &mut [f64], b: &[f64], k: usize) -> Option<Vec<f64>> {
    let scale = (0..k).map(|i| a[i * k + i].abs()).fold(0.0, f64::max);
    for j in 0..k {
        let mut d = a[j * k + j];
        for p in 0..j {
            d -= a[j * k + p] * a[j * k + p];
        }
        if !(d > 1e-12 * scale) {
            return None;
        }
        let d = d.sqrt();
        a[j * k + j] = d;
        for i in j + 1..k {
            let mut s = a[i * k + j];
            for p in 0..j {
                s -= a[i * k + p] * a[j * k + p];
            }
            a[i * k + j] = s / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..k {
        for p in 0..i {
            y[i] -= a[i * k + p] * y[p];
        }
        y[i] /= a[i * k + i];
    }
    for i in (0..k).rev() {
        for p in i + 1..k {
            y[i] -= a[p * k + i] * y[p];
        }
        y[i] /= a[i * k + i];
    }
    Some(y)
}
