//! Parametric bootstrap of conditional risk forecasts.
//!
//! With `sigma_t` held fixed, the only noise is in the daily mean: each
//! replication draws `mu_i ~ N(0, sd^2)` and shifts the scaled measure to
//! `-mu_i + sigma_t M(0, 1)`. Every measure of a forecast is therefore an
//! affine shift of the same sample and all of them share one standard error.

use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;
#[allow(unused_imports)]
use num_traits::Float;

use crate::garch::Forecast;
use crate::measures::StandardNormalMeasure;
use crate::rng::NormalStream;
use crate::special::normal_quantile;
use crate::{stats, Error, Result};

// Streams for the calibration pass, kept clear of per-forecast streams.
const CALIBRATION_MU_STREAM: u64 = u64::MAX;
const CALIBRATION_NOISE_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Calibration {
    /// `sd(mu) = sigma_t / 2`.
    #[default]
    HalfSigma,
    /// Assume variance `v0` for `mu` (default `sigma_t^2`), simulate
    /// `mu + sigma_t eps`, measure the sample std `s*`, and use variance
    /// `v0 * sigma_t / s*`. One pass.
    LiteralAppendix1 {
        #[cfg_attr(feature = "serde", serde(default))]
        initial_variance: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CiMethod {
    #[default]
    Percentile,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct BootstrapConfig {
    pub replications: usize,
    pub seed: u64,
    pub calibration: Calibration,
    pub ci_method: CiMethod,
    pub ci_level: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replications: 10_000,
            seed: 0,
            calibration: Calibration::HalfSigma,
            ci_method: CiMethod::Percentile,
            ci_level: 0.90,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 100 {
            return Err(Error::InvalidParameter(alloc::format!(
                "bootstrap needs at least 100 replications, got {}",
                self.replications
            )));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "CI level {} is not in (0, 1)",
                self.ci_level
            )));
        }
        if let Calibration::LiteralAppendix1 { initial_variance: Some(v) } = self.calibration {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "initial variance {v} must be positive"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrecisionReport {
    pub measure: String,
    pub estimate: f64,
    pub se: f64,
    /// `se / estimate`.
    pub st_se: f64,
    pub ci: (f64, f64),
    /// `ci / estimate`.
    pub st_ci: (f64, f64),
}

/// Standard deviation used for the simulated means.
pub fn calibrate_mu_sd(forecast: &Forecast, config: &BootstrapConfig) -> f64 {
    let sigma = forecast.sigma;
    if !(sigma > 0.0) {
        return 0.0;
    }
    match config.calibration {
        Calibration::HalfSigma => sigma / 2.0,
        Calibration::LiteralAppendix1 { initial_variance } => {
            let v0 = initial_variance.unwrap_or(sigma * sigma);
            let sd0 = v0.sqrt();
            let mut mu = NormalStream::new(config.seed, CALIBRATION_MU_STREAM);
            let mut eps = NormalStream::new(config.seed, CALIBRATION_NOISE_STREAM);
            let simulated: Vec<f64> = (0..config.replications.max(2))
                .map(|_| sd0 * mu.next_normal() + sigma * eps.next_normal())
                .collect();
            let s_star = stats::sample_std(&simulated);
            (v0 * sigma / s_star).sqrt()
        }
    }
}

/// Draws shared by every measure of one forecast.
#[derive(Debug, Clone)]
pub struct MeanDraws {
    /// `-mu_i`, ascending.
    neg_sorted: Vec<f64>,
    se: f64,
}

impl MeanDraws {
    /// `m` zero-mean normal draws with standard deviation `sd`, from the
    /// random stream `stream` of the configured seed.
    pub fn generate(sd: f64, config: &BootstrapConfig, stream: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = NormalStream::new(config.seed, stream);
        let mut neg: Vec<f64> = (0..config.replications).map(|_| -(sd * rng.next_normal())).collect();
        let se = stats::sample_std(&neg);
        neg.sort_by(f64::total_cmp);
        Ok(Self { neg_sorted: neg, se })
    }

    /// Sample standard deviation of the draws.
    pub fn se(&self) -> f64 {
        self.se
    }

    pub fn report(
        &self,
        measure: &StandardNormalMeasure,
        forecast: &Forecast,
        config: &BootstrapConfig,
    ) -> PrecisionReport {
        let estimate = measure.scale(forecast.mu, forecast.sigma);
        let centre = forecast.sigma * measure.value;
        let tail = (1.0 - config.ci_level) / 2.0;
        let ci = match config.ci_method {
            CiMethod::Percentile => (
                centre + stats::quantile_sorted(&self.neg_sorted, tail),
                centre + stats::quantile_sorted(&self.neg_sorted, 1.0 - tail),
            ),
            CiMethod::NormalApprox => {
                let half = normal_quantile(1.0 - tail) * self.se;
                (estimate - half, estimate + half)
            }
        };
        PrecisionReport {
            measure: measure.spec.label(),
            estimate,
            se: self.se,
            st_se: self.se / estimate,
            ci,
            st_ci: (ci.0 / estimate, ci.1 / estimate),
        }
    }
}

/// Precision of one forecast's risk measure, using random stream 0.
pub fn bootstrap_measure(
    measure: &StandardNormalMeasure,
    forecast: &Forecast,
    config: &BootstrapConfig,
) -> Result<PrecisionReport> {
    bootstrap_measure_on_stream(measure, forecast, config, 0)
}

pub fn bootstrap_measure_on_stream(
    measure: &StandardNormalMeasure,
    forecast: &Forecast,
    config: &BootstrapConfig,
    stream: u64,
) -> Result<PrecisionReport> {
    let draws = MeanDraws::generate(calibrate_mu_sd(forecast, config), config, stream)?;
    Ok(draws.report(measure, forecast, config))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrecisionRow {
    pub date: NaiveDate,
    pub report: PrecisionReport,
}

/// One report per (forecast, measure). Forecast `i` uses random stream `i`
/// for every measure, so measures of the same day share their draws.
pub fn precision_table(
    forecasts: &[Forecast],
    measures: &[StandardNormalMeasure],
    config: &BootstrapConfig,
) -> Result<Vec<PrecisionRow>> {
    if forecasts.is_empty() || measures.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    config.validate()?;
    let mut rows = Vec::with_capacity(forecasts.len() * measures.len());
    for (i, f) in forecasts.iter().enumerate() {
        let draws = MeanDraws::generate(calibrate_mu_sd(f, config), config, i as u64)?;
        for m in measures {
            rows.push(PrecisionRow { date: f.date, report: draws.report(m, f, config) });
        }
    }
    Ok(rows)
}
