//! Gaussian AR(1)-GARCH(1,1) for daily percent returns.
//!
//! ```text
//! r_t        ~ N(mu_t, sigma_t^2)
//! mu_t       = rho * r_{t-1}
//! sigma_t^2  = omega + alpha * x_{t-1}^2 + beta * sigma_{t-1}^2
//! ```
//!
//! where `x` is the previous *return* by default ([`VarianceSource::Returns`])
//! or the previous innovation `r - mu` ([`VarianceSource::Residuals`], the
//! textbook form). The first day of every window starts from `mu_1 = 0` and
//! `sigma_1^2` equal to the window's sample variance.

mod fit;
mod optim;
mod rolling;
mod simulate;

use alloc::format;
use alloc::vec::Vec;

use chrono::NaiveDate;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

pub use fit::{fit, FitOptions, Optimizer};
pub use rolling::{rolling_forecasts, DayDiagnostics, RollingForecasts, RollingOptions, WindowKind};
pub use simulate::{business_days, simulate, synthetic_prices};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Stationarity margin enforced on every fitted `alpha + beta`.
pub const PERSISTENCE_CAP: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GarchParams {
    pub rho: f64,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl GarchParams {
    pub fn new(rho: f64, omega: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { rho, omega, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.rho, self.omega, self.alpha, self.beta].iter().all(|v| v.is_finite());
        if !finite
            || self.rho.abs() >= 1.0
            || self.omega < 0.0
            || self.alpha < 0.0
            || self.beta < 0.0
            || self.alpha + self.beta >= 1.0
        {
            return Err(Error::InvalidParameter(format!(
                "GARCH parameters outside |rho|<1, omega>=0, alpha,beta>=0, alpha+beta<1: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn persistence(&self) -> f64 {
        self.alpha + self.beta
    }

    /// `omega / (1 - alpha - beta)`, the long-run level of `sigma_t^2`.
    pub fn unconditional_variance(&self) -> f64 {
        self.omega / (1.0 - self.persistence())
    }

    /// Element-wise mean of a non-empty parameter set.
    pub fn mean_of(params: &[GarchParams]) -> Option<GarchParams> {
        if params.is_empty() {
            return None;
        }
        let n = params.len() as f64;
        let sum = params.iter().fold([0.0; 4], |acc, p| {
            [acc[0] + p.rho, acc[1] + p.omega, acc[2] + p.alpha, acc[3] + p.beta]
        });
        Some(GarchParams { rho: sum[0] / n, omega: sum[1] / n, alpha: sum[2] / n, beta: sum[3] / n })
    }
}

/// What drives the ARCH term of the variance recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum VarianceSource {
    /// `alpha * r_{t-1}^2`.
    #[default]
    Returns,
    /// `alpha * (r_{t-1} - mu_{t-1})^2`.
    Residuals,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GarchFit {
    pub params: GarchParams,
    pub log_likelihood: f64,
    pub sigma_path: Vec<f64>,
    pub mu_path: Vec<f64>,
    pub residuals: Vec<f64>,
    pub std_residuals: Vec<f64>,
    pub window: (NaiveDate, NaiveDate),
    pub init_variance: f64,
    pub source: VarianceSource,
    pub converged: bool,
    pub iterations: usize,
    pub optimizer: Optimizer,
}

impl GarchFit {
    /// Filters `returns` through fixed `params` without optimizing.
    pub fn evaluate(
        returns: &crate::timeseries::ReturnSeries,
        params: GarchParams,
        source: VarianceSource,
    ) -> Result<Self> {
        let values = returns.values();
        let dates = returns.dates();
        if values.len() < 2 {
            return Err(Error::InsufficientData { needed: 2, got: values.len() });
        }
        let init_variance = crate::stats::sample_variance(values);
        if !crate::stats::has_variation(values) {
            return Err(Error::Degenerate("returns have no variation"));
        }
        let paths = filter(values, &params, init_variance, source)?;
        Ok(Self {
            params,
            log_likelihood: paths.log_likelihood,
            std_residuals: paths.residuals.iter().zip(&paths.sigma).map(|(e, s)| e / s).collect(),
            sigma_path: paths.sigma,
            mu_path: paths.mu,
            residuals: paths.residuals,
            window: (dates[0], dates[dates.len() - 1]),
            init_variance,
            source,
            converged: true,
            iterations: 0,
            optimizer: Optimizer::None,
        })
    }

    pub fn aic(&self) -> f64 {
        -2.0 * self.log_likelihood + 8.0
    }

    pub fn bic(&self) -> f64 {
        -2.0 * self.log_likelihood + 4.0 * (self.sigma_path.len() as f64).ln()
    }
}

/// One-day-ahead conditional mean and volatility, in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Forecast {
    pub date: NaiveDate,
    pub mu: f64,
    pub sigma: f64,
    pub source_params: GarchParams,
}

impl Forecast {
    /// Averages `mu`, `sigma` and the parameters over a non-empty set, dated
    /// by the last forecast.
    pub fn average(forecasts: &[Forecast]) -> Option<Forecast> {
        let last = forecasts.last()?;
        let n = forecasts.len() as f64;
        let params: Vec<GarchParams> = forecasts.iter().map(|f| f.source_params).collect();
        Some(Forecast {
            date: last.date,
            mu: forecasts.iter().map(|f| f.mu).sum::<f64>() / n,
            sigma: forecasts.iter().map(|f| f.sigma).sum::<f64>() / n,
            source_params: GarchParams::mean_of(&params)?,
        })
    }
}

pub(crate) struct Paths {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub residuals: Vec<f64>,
    pub log_likelihood: f64,
}

pub(crate) fn filter(
    returns: &[f64],
    params: &GarchParams,
    init_variance: f64,
    source: VarianceSource,
) -> Result<Paths> {
    let n = returns.len();
    let mut out = Paths {
        mu: Vec::with_capacity(n),
        sigma: Vec::with_capacity(n),
        residuals: Vec::with_capacity(n),
        log_likelihood: 0.0,
    };
    let mut var = init_variance;
    let mut mu = 0.0;
    for (t, &r) in returns.iter().enumerate() {
        if t > 0 {
            let prev = returns[t - 1];
            let shock = match source {
                VarianceSource::Returns => prev,
                VarianceSource::Residuals => prev - out.mu[t - 1],
            };
            mu = params.rho * prev;
            var = params.omega + params.alpha * shock * shock + params.beta * var;
        }
        if !(var > 0.0) || !var.is_finite() {
            return Err(Error::DegenerateModel { t, variance: var });
        }
        let e = r - mu;
        out.log_likelihood += -0.5 * (LN_2PI + var.ln() + e * e / var);
        out.mu.push(mu);
        out.sigma.push(var.sqrt());
        out.residuals.push(e);
    }
    Ok(out)
}

// Allocation-free likelihood for the optimizer; `None` on a degenerate path.
pub(crate) fn log_likelihood_fast(
    returns: &[f64],
    params: &GarchParams,
    init_variance: f64,
    source: VarianceSource,
) -> Option<f64> {
    let mut var = init_variance;
    let mut mu = 0.0;
    let mut ll = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &r in returns {
        if let Some((prev_r, prev_mu)) = prev {
            let shock = match source {
                VarianceSource::Returns => prev_r,
                VarianceSource::Residuals => prev_r - prev_mu,
            };
            mu = params.rho * prev_r;
            var = params.omega + params.alpha * shock * shock + params.beta * var;
        }
        if !(var > 0.0) {
            return None;
        }
        let e = r - mu;
        ll += var.ln() + e * e / var;
        prev = Some((r, mu));
    }
    let ll = -0.5 * (returns.len() as f64 * LN_2PI + ll);
    ll.is_finite().then_some(ll)
}

/// Gaussian conditional log-likelihood of `returns` under `params`.
pub fn log_likelihood(
    returns: &[f64],
    params: &GarchParams,
    init_variance: f64,
    source: VarianceSource,
) -> Result<f64> {
    params.validate()?;
    if !(init_variance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "initial variance must be positive, got {init_variance}"
        )));
    }
    filter(returns, params, init_variance, source).map(|p| p.log_likelihood)
}

/// Next-day forecast from a fitted window whose last return is `last_return`.
pub fn forecast_next(fit: &GarchFit, last_return: f64, date: NaiveDate) -> Forecast {
    let p = fit.params;
    let sigma_last = fit.sigma_path.last().copied().unwrap_or(fit.init_variance.sqrt());
    let shock = match fit.source {
        VarianceSource::Returns => last_return,
        VarianceSource::Residuals => last_return - fit.mu_path.last().copied().unwrap_or(0.0),
    };
    let var = p.omega + p.alpha * shock * shock + p.beta * sigma_last * sigma_last;
    Forecast { date, mu: p.rho * last_return, sigma: var.sqrt(), source_params: p }
}
