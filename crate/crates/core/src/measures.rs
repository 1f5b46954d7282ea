//! Value-at-Risk, Expected Shortfall and exponential spectral risk measures.
//!
//! All three are quantile-weighted averages `M = -int_0^1 phi(p) q_p dp` of
//! the return distribution, oriented so that `p -> 0` is the loss tail. Under
//! conditional normality each is `-mu + sigma * M(0, 1)`; this module
//! computes `M(0, 1)` and applies the location-scale step.

use alloc::format;
use alloc::string::String;

#[allow(unused_imports)]
use num_traits::Float;

use crate::garch::Forecast;
use crate::quadrature::{integrate, QuadratureSpec};
use crate::special::{normal_cdf, normal_pdf, normal_quantile};
use crate::{Error, Result};

/// Confidence level `alpha_c` in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct ConfidenceLevel(f64);

impl ConfidenceLevel {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParameter(format!("confidence level {value} is not in (0, 1)")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Probability of an exceedance, `1 - alpha_c`.
    pub fn tail(self) -> f64 {
        1.0 - self.0
    }
}

impl TryFrom<f64> for ConfidenceLevel {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ConfidenceLevel> for f64 {
    fn from(c: ConfidenceLevel) -> f64 {
        c.0
    }
}

/// Coefficient of absolute risk aversion `k > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct RiskAversion(f64);

impl RiskAversion {
    pub fn new(k: f64) -> Result<Self> {
        if k > 0.0 && k.is_finite() {
            Ok(Self(k))
        } else {
            Err(Error::InvalidParameter(format!("risk aversion {k} must be positive and finite")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RiskAversion {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RiskAversion> for f64 {
    fn from(k: RiskAversion) -> f64 {
        k.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "measure", rename_all = "snake_case"))]
pub enum RiskSpec {
    Var {
        alpha: ConfidenceLevel,
    },
    Es {
        alpha: ConfidenceLevel,
    },
    Spectral {
        k: RiskAversion,
        #[cfg_attr(feature = "serde", serde(default))]
        quadrature: QuadratureSpec,
    },
}

impl RiskSpec {
    pub fn var(alpha: f64) -> Result<Self> {
        Ok(Self::Var { alpha: ConfidenceLevel::new(alpha)? })
    }

    pub fn es(alpha: f64) -> Result<Self> {
        Ok(Self::Es { alpha: ConfidenceLevel::new(alpha)? })
    }

    /// Exponential spectral measure with the default trapezoid, N = 30000.
    pub fn spectral(k: f64) -> Result<Self> {
        Ok(Self::Spectral { k: RiskAversion::new(k)?, quadrature: QuadratureSpec::default() })
    }

    /// Short column-friendly name such as `var_0.95` or `srm_k50`.
    pub fn label(&self) -> String {
        match self {
            RiskSpec::Var { alpha } => format!("var_{}", alpha.value()),
            RiskSpec::Es { alpha } => format!("es_{}", alpha.value()),
            RiskSpec::Spectral { k, .. } => format!("srm_k{}", k.value()),
        }
    }
}

/// `M(0, 1)`: a risk measure of the standard normal, in units of `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StandardNormalMeasure {
    pub spec: RiskSpec,
    pub value: f64,
}

impl StandardNormalMeasure {
    /// `-mu + sigma * M(0, 1)`.
    pub fn scale(&self, mu: f64, sigma: f64) -> f64 {
        -mu + sigma * self.value
    }
}

/// Exponential risk-aversion weight `k e^{-kp} / (1 - e^{-k})`.
pub fn spectral_weight(p: f64, k: RiskAversion) -> f64 {
    let k = k.value();
    k * (-k * p).exp() / -(-k).exp_m1()
}

pub fn std_normal_var(alpha: ConfidenceLevel) -> StandardNormalMeasure {
    StandardNormalMeasure { spec: RiskSpec::Var { alpha }, value: normal_quantile(alpha.value()) }
}

pub fn std_normal_es(alpha: ConfidenceLevel) -> StandardNormalMeasure {
    let z = normal_quantile(alpha.value());
    StandardNormalMeasure { spec: RiskSpec::Es { alpha }, value: normal_pdf(z) / alpha.tail() }
}

/// `k/(1-e^{-k}) * int_0^1 e^{-kp} (-z_p) dp` by the given quadrature.
pub fn std_normal_srm(k: RiskAversion, quadrature: QuadratureSpec) -> Result<StandardNormalMeasure> {
    let value = integrate(|p| spectral_weight(p, k) * -normal_quantile(p), &quadrature)?;
    Ok(StandardNormalMeasure { spec: RiskSpec::Spectral { k, quadrature }, value })
}

pub fn std_normal_measure(spec: &RiskSpec) -> Result<StandardNormalMeasure> {
    match *spec {
        RiskSpec::Var { alpha } => Ok(std_normal_var(alpha)),
        RiskSpec::Es { alpha } => Ok(std_normal_es(alpha)),
        RiskSpec::Spectral { k, quadrature } => std_normal_srm(k, quadrature),
    }
}

/// Risk forecast for a long position, in percent of position value.
pub fn scale_measure(measure: &StandardNormalMeasure, forecast: &Forecast) -> f64 {
    measure.scale(forecast.mu, forecast.sigma)
}

/// Evaluates the measure on `N(mu, sigma^2)` from its quantile-weighted
/// definition, without going through `M(0, 1)`.
///
/// VaR is the negated `1 - alpha_c` quantile, ES the negated partial
/// expectation below it, and the spectral measure integrates the weighted
/// conditional quantile `mu + sigma z_p` with its own quadrature.
pub fn conditional_measure(spec: &RiskSpec, mu: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    match *spec {
        RiskSpec::Var { alpha } => Ok(-(mu + sigma * normal_quantile(alpha.tail()))),
        RiskSpec::Es { alpha } => {
            let z = normal_quantile(alpha.tail());
            let partial = mu * normal_cdf(z) - sigma * normal_pdf(z);
            Ok(-partial / alpha.tail())
        }
        RiskSpec::Spectral { k, quadrature } => integrate(
            |p| spectral_weight(p, k) * -(mu + sigma * normal_quantile(p)),
            &quadrature,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn level(v: f64) -> ConfidenceLevel {
        ConfidenceLevel::new(v).unwrap()
    }

    fn forecast(mu: f64, sigma: f64) -> Forecast {
        Forecast {
            date: NaiveDate::from_ymd_opt(2002, 1, 2).unwrap(),
            mu,
            sigma,
            source_params: crate::garch::GarchParams::new(0.0, 0.1, 0.1, 0.8).unwrap(),
        }
    }

    #[test]
    fn weight_limits() {
        let tiny = RiskAversion::new(1e-8).unwrap();
        for p in [0.01, 0.5, 0.99] {
            assert!((spectral_weight(p, tiny) - 1.0).abs() < 1e-6);
        }
        let k50 = RiskAversion::new(50.0).unwrap();
        assert!((spectral_weight(0.0, k50) - 50.0 / (1.0 - (-50.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters() {
        assert!(ConfidenceLevel::new(1.0).is_err());
        assert!(ConfidenceLevel::new(0.0).is_err());
        assert!(RiskAversion::new(0.0).is_err());
        assert!(RiskAversion::new(f64::INFINITY).is_err());
    }

    #[test]
    fn closed_form_anchors() {
        assert!((std_normal_var(level(0.95)).value - 1.6449).abs() < 5e-5);
        assert!((std_normal_var(level(0.99)).value - 2.3263).abs() < 5e-5);
        assert_eq!(std_normal_var(level(0.5)).value, 0.0);
        assert!((std_normal_es(level(0.95)).value - 2.0627).abs() < 5e-5);
        assert!((std_normal_es(level(0.99)).value - 2.6652).abs() < 5e-5);
        let ratio = std_normal_es(level(0.95)).value / std_normal_var(level(0.95)).value;
        assert!((ratio - 1.2540).abs() < 5e-5);
    }

    #[test]
    fn scaling_examples() {
        let var = std_normal_var(level(0.95));
        assert_eq!(scale_measure(&var, &forecast(0.0, 1.0)), var.value);
        let v = scale_measure(&var, &forecast(0.1, 2.0));
        assert!((v - (-0.1 + 2.0 * var.value)).abs() < 1e-15);
        assert!((v - 3.1898).abs() < 1e-4);
    }

    #[test]
    fn labels() {
        assert_eq!(RiskSpec::var(0.95).unwrap().label(), "var_0.95");
        assert_eq!(RiskSpec::spectral(50.0).unwrap().label(), "srm_k50");
    }

    #[test]
    fn conditional_rejects_zero_sigma() {
        assert!(conditional_measure(&RiskSpec::var(0.95).unwrap(), 0.0, 0.0).is_err());
    }
}
