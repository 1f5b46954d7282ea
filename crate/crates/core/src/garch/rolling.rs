use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::NaiveDate;

use super::{fit, forecast_next, FitOptions, Forecast, GarchFit, GarchParams};
use crate::timeseries::ReturnSeries;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WindowKind {
    /// The trailing `init_window` returns.
    #[default]
    Fixed,
    /// Every return before the forecast day.
    Expanding,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct RollingOptions {
    pub init_window: usize,
    pub refit_every: usize,
    pub window: WindowKind,
    /// Start each refit from the previous day's estimates.
    pub warm_start: bool,
    /// Abort on the first failed refit instead of recording it.
    pub strict: bool,
    pub fit: FitOptions,
}

impl Default for RollingOptions {
    fn default() -> Self {
        Self {
            init_window: 523,
            refit_every: 1,
            window: WindowKind::Fixed,
            warm_start: true,
            strict: false,
            fit: FitOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DayDiagnostics {
    pub date: NaiveDate,
    pub refit: bool,
    pub converged: bool,
    pub iterations: usize,
    pub log_likelihood: f64,
    /// Set when the refit failed and earlier (or best-so-far) parameters
    /// were carried forward.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RollingForecasts {
    pub forecasts: Vec<Forecast>,
    pub refit_params: Vec<GarchParams>,
    pub diagnostics: Vec<DayDiagnostics>,
}

impl RollingForecasts {
    pub fn len(&self) -> usize {
        self.forecasts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forecasts.is_empty()
    }

    pub fn failures(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.error.is_some()).count()
    }
}

/// Re-estimates the model on a rolling window and forecasts each
/// out-of-sample day `t >= init_window` from data up to `t - 1`.
///
/// Warm-started refits form a chain, so days are processed in order.
pub fn rolling_forecasts(returns: &ReturnSeries, options: &RollingOptions) -> Result<RollingForecasts> {
    let n = returns.len();
    let w = options.init_window;
    if w == 0 || w + 1 > n {
        return Err(Error::InsufficientData { needed: w.max(1) + 1, got: n });
    }
    if options.refit_every == 0 {
        return Err(Error::InvalidParameter("refit_every must be at least 1".into()));
    }
    let values = returns.values();
    let dates = returns.dates();

    let mut out = RollingForecasts {
        forecasts: Vec::with_capacity(n - w),
        refit_params: Vec::with_capacity(n - w),
        diagnostics: Vec::with_capacity(n - w),
    };
    let mut current: Option<GarchParams> = None;

    for (k, t) in (w..n).enumerate() {
        let start = match options.window {
            WindowKind::Fixed => t - w,
            WindowKind::Expanding => 0,
        };
        let window = returns.slice(start..t);
        let refit = current.is_none() || k % options.refit_every == 0;

        let mut error = None;
        let fitted: GarchFit = if refit {
            let mut fit_options = options.fit;
            if options.warm_start {
                fit_options.start = current.or(fit_options.start);
            }
            match fit(&window, &fit_options) {
                Ok(f) => f,
                Err(e) if options.strict => return Err(e),
                Err(Error::NonConvergence { best, .. }) => {
                    error = Some("did not converge; using best-so-far estimates".to_string());
                    *best
                }
                Err(e) => match current {
                    Some(p) => {
                        error = Some(e.to_string());
                        GarchFit::evaluate(&window, p, options.fit.source)?
                    }
                    None => return Err(e),
                },
            }
        } else {
            // `current` is always set once a refit has happened
            GarchFit::evaluate(&window, current.unwrap(), options.fit.source)?
        };

        current = Some(fitted.params);
        out.forecasts.push(forecast_next(&fitted, values[t - 1], dates[t]));
        out.refit_params.push(fitted.params);
        out.diagnostics.push(DayDiagnostics {
            date: dates[t],
            refit,
            converged: fitted.converged && error.is_none(),
            iterations: fitted.iterations,
            log_likelihood: fitted.log_likelihood,
            error,
        });
    }
    Ok(out)
}
