//! Out-of-sample evaluation of rolling forecasts.

use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;
#[allow(unused_imports)]
use num_traits::Float;

use crate::garch::Forecast;
use crate::measures::ConfidenceLevel;
use crate::special::{
    binomial_cdf, binomial_pmf, binomial_sf, chi_square_cdf, chi_square_sf, kolmogorov_sf,
    normal_cdf, normal_quantile, normal_sf, student_t_two_sided,
};
use crate::timeseries::{ReturnSeries, TestResult};
use crate::{stats, Error, Result};

/// Probability integral transforms `p_t = Phi((r_t - mu_t) / sigma_t)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PitSeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

/// Pairs each forecast with the realized return of its date.
pub fn align<'a>(returns: &ReturnSeries, forecasts: &'a [Forecast]) -> Result<Vec<(f64, &'a Forecast)>> {
    if forecasts.is_empty() {
        return Err(Error::Alignment("no forecasts to evaluate".into()));
    }
    forecasts
        .iter()
        .map(|f| match returns.position(f.date) {
            Some(i) => Ok((returns.values()[i], f)),
            None => Err(Error::Alignment(alloc::format!("no return on forecast date {}", f.date))),
        })
        .collect()
}

pub fn pit(returns: &ReturnSeries, forecasts: &[Forecast]) -> Result<PitSeries> {
    let pairs = align(returns, forecasts)?;
    Ok(PitSeries {
        dates: pairs.iter().map(|(_, f)| f.date).collect(),
        values: pairs.iter().map(|(r, f)| normal_cdf((r - f.mu) / f.sigma)).collect(),
    })
}

/// Days with a loss beyond the forecast VaR, `r_t < -(-mu_t + sigma_t z)`.
pub fn count_exceedances(returns: &ReturnSeries, forecasts: &[Forecast], alpha: ConfidenceLevel) -> Result<usize> {
    let z = normal_quantile(alpha.value());
    Ok(align(returns, forecasts)?
        .iter()
        .filter(|(r, f)| *r < -(-f.mu + f.sigma * z))
        .count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KupiecVariant {
    /// Sum of the probabilities of all counts no more likely than `x`.
    ExactTwoSided,
    /// `min(1, 2 min(P(X <= x), P(X >= x)))`.
    DoubledOneSided,
    /// Two-sided normal approximation to the binomial.
    NormalTwoSided,
    /// Kupiec's proportion-of-failures likelihood ratio against chi-square(1).
    LikelihoodRatio,
    /// `min(P(X <= x), P(X > x))`; the smaller binomial CDF tail split at `x`.
    #[default]
    BinomialTail,
}

impl KupiecVariant {
    pub const ALL: [KupiecVariant; 5] = [
        KupiecVariant::ExactTwoSided,
        KupiecVariant::DoubledOneSided,
        KupiecVariant::NormalTwoSided,
        KupiecVariant::LikelihoodRatio,
        KupiecVariant::BinomialTail,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KupiecVariant::ExactTwoSided => "exact_two_sided",
            KupiecVariant::DoubledOneSided => "doubled_one_sided",
            KupiecVariant::NormalTwoSided => "normal_two_sided",
            KupiecVariant::LikelihoodRatio => "likelihood_ratio",
            KupiecVariant::BinomialTail => "binomial_tail",
        }
    }
}

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// p-value for `x` exceedances in `n` days when each day exceeds with
/// probability `1 - alpha_c`.
pub fn kupiec_test(x: u64, n: u64, alpha: ConfidenceLevel, variant: KupiecVariant) -> Result<f64> {
    if x > n || n == 0 {
        return Err(Error::InvalidParameter(alloc::format!("{x} exceedances in {n} days")));
    }
    let p = alpha.tail();
    let nf = n as f64;
    let value = match variant {
        KupiecVariant::ExactTwoSided => {
            let px = binomial_pmf(x, n, p);
            let cutoff = px * (1.0 + 1e-7);
            (0..=n).map(|k| binomial_pmf(k, n, p)).filter(|&pk| pk <= cutoff).sum::<f64>()
        }
        KupiecVariant::DoubledOneSided => {
            let lower = binomial_cdf(x, n, p);
            let upper = if x == 0 { 1.0 } else { binomial_sf(x - 1, n, p) };
            2.0 * lower.min(upper)
        }
        KupiecVariant::NormalTwoSided => {
            let z = (x as f64 - nf * p) / (nf * p * (1.0 - p)).sqrt();
            2.0 * normal_sf(z.abs())
        }
        KupiecVariant::LikelihoodRatio => {
            let xf = x as f64;
            let hat = xf / nf;
            let null = xlogy(nf - xf, 1.0 - p) + xlogy(xf, p);
            let alt = xlogy(nf - xf, 1.0 - hat) + xlogy(xf, hat);
            chi_square_sf((-2.0 * (null - alt)).max(0.0), 1.0)
        }
        KupiecVariant::BinomialTail => {
            let lower = binomial_cdf(x, n, p);
            lower.min(1.0 - lower)
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Sample moments of standardized residuals; kurtosis is non-excess.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResidualMoments {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

impl ResidualMoments {
    pub fn from_sample(xs: &[f64]) -> Result<Self> {
        if xs.len() < 8 {
            return Err(Error::InsufficientData { needed: 8, got: xs.len() });
        }
        let degenerate = Error::Degenerate("standardized residuals have zero variance");
        let mean = stats::mean(xs);
        let std_dev = stats::sample_std(xs);
        if !stats::has_variation(xs) {
            return Err(degenerate);
        }
        let (Some(skewness), Some(kurtosis)) = (stats::skewness(xs), stats::kurtosis(xs)) else {
            return Err(degenerate);
        };
        Ok(Self { n: xs.len(), mean, std_dev, skewness, kurtosis })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResidualTests {
    pub moments: ResidualMoments,
    pub z_test: TestResult,
    pub t_test: TestResult,
    pub variance_ratio: TestResult,
    pub jarque_bera: TestResult,
}

/// Mean zero with unit variance known: `mean sqrt(n)` against N(0, 1).
pub fn z_test(mean: f64, n: usize) -> TestResult {
    let statistic = mean * (n as f64).sqrt();
    TestResult { statistic, p_value: 2.0 * normal_sf(statistic.abs()) }
}

pub fn t_test(mean: f64, std_dev: f64, n: usize) -> TestResult {
    let statistic = mean * (n as f64).sqrt() / std_dev;
    TestResult { statistic, p_value: student_t_two_sided(statistic, n as f64 - 1.0) }
}

/// Unit variance: `(n-1) s^2` against chi-square(n-1), `2 min(tails)`.
pub fn variance_ratio_test(std_dev: f64, n: usize) -> TestResult {
    let dof = n as f64 - 1.0;
    let statistic = dof * std_dev * std_dev;
    let tails = chi_square_cdf(statistic, dof).min(chi_square_sf(statistic, dof));
    TestResult { statistic, p_value: (2.0 * tails).min(1.0) }
}

pub fn jarque_bera(skewness: f64, kurtosis: f64, n: usize) -> TestResult {
    let excess = kurtosis - 3.0;
    let statistic = n as f64 / 6.0 * (skewness * skewness + excess * excess / 4.0);
    TestResult { statistic, p_value: chi_square_sf(statistic, 2.0) }
}

pub fn residual_tests_from_moments(moments: ResidualMoments) -> ResidualTests {
    let ResidualMoments { n, mean, std_dev, skewness, kurtosis } = moments;
    ResidualTests {
        moments,
        z_test: z_test(mean, n),
        t_test: t_test(mean, std_dev, n),
        variance_ratio: variance_ratio_test(std_dev, n),
        jarque_bera: jarque_bera(skewness, kurtosis, n),
    }
}

/// Tests of standard normality that take independence for granted.
pub fn residual_tests(std_residuals: &[f64]) -> Result<ResidualTests> {
    Ok(residual_tests_from_moments(ResidualMoments::from_sample(std_residuals)?))
}

/// One-sample Kolmogorov-Smirnov test against U(0, 1), with Stephens'
/// small-sample adjustment to the asymptotic distribution.
pub fn ks_uniform(values: &[f64]) -> Result<TestResult> {
    if values.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let sorted = stats::sorted(values);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &u)| ((i as f64 + 1.0) / n - u).max(u - i as f64 / n))
        .fold(0.0, f64::max);
    let root = n.sqrt();
    Ok(TestResult { statistic: d, p_value: kolmogorov_sf((root + 0.12 + 0.11 / root) * d) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PValues {
    pub kupiec: f64,
    pub z_test: f64,
    pub t_test: f64,
    pub variance_ratio: f64,
    pub jarque_bera: f64,
    pub ks_uniform: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BacktestReport {
    pub n: usize,
    pub alpha: f64,
    pub exceedances: usize,
    pub residual_moments: ResidualMoments,
    pub p_values: PValues,
    pub kupiec_variant: String,
}

pub fn backtest(returns: &ReturnSeries, forecasts: &[Forecast], alpha: ConfidenceLevel) -> Result<BacktestReport> {
    backtest_with(returns, forecasts, alpha, KupiecVariant::default())
}

pub fn backtest_with(
    returns: &ReturnSeries,
    forecasts: &[Forecast],
    alpha: ConfidenceLevel,
    variant: KupiecVariant,
) -> Result<BacktestReport> {
    let pairs = align(returns, forecasts)?;
    let n = pairs.len();
    let std_residuals: Vec<f64> = pairs.iter().map(|(r, f)| (r - f.mu) / f.sigma).collect();
    let pits: Vec<f64> = std_residuals.iter().map(|&e| normal_cdf(e)).collect();
    let exceedances = count_exceedances(returns, forecasts, alpha)?;
    let residuals = residual_tests(&std_residuals)?;
    Ok(BacktestReport {
        n,
        alpha: alpha.value(),
        exceedances,
        residual_moments: residuals.moments,
        p_values: PValues {
            kupiec: kupiec_test(exceedances as u64, n as u64, alpha, variant)?,
            z_test: residuals.z_test.p_value,
            t_test: residuals.t_test.p_value,
            variance_ratio: residuals.variance_ratio.p_value,
            jarque_bera: residuals.jarque_bera.p_value,
            ks_uniform: ks_uniform(&pits)?.p_value,
        },
        kupiec_variant: variant.name().into(),
    })
}
