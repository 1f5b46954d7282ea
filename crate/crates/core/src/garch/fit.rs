use alloc::boxed::Box;

#[allow(unused_imports)]
use num_traits::Float;

use super::optim::{self, Tolerances};
use super::{log_likelihood_fast, GarchFit, GarchParams, VarianceSource, PERSISTENCE_CAP};
use crate::timeseries::ReturnSeries;
use crate::{stats, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Optimizer {
    /// Parameters were supplied, not estimated.
    #[default]
    None,
    Bfgs,
    NelderMead,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct FitOptions {
    pub min_obs: usize,
    pub max_iter: usize,
    /// Stop once an iteration gains less log-likelihood than this...
    pub f_tol: f64,
    /// ...and moves the transformed parameters by less than this.
    pub x_tol: f64,
    pub source: VarianceSource,
    /// Starting point; `None` uses `rho = 0`, `omega = 0.1 * var`,
    /// `alpha = 0.05`, `beta = 0.90`.
    pub start: Option<GarchParams>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            min_obs: 100,
            max_iter: 500,
            f_tol: 1e-8,
            x_tol: 1e-7,
            source: VarianceSource::Returns,
            start: None,
        }
    }
}

// The optimizer works on R^4:
//   rho   = tanh(x0)
//   omega = exp(x1)
//   alpha = c e^x2 / (1 + e^x2 + e^x3),  beta = c e^x3 / (1 + e^x2 + e^x3)
// with c = PERSISTENCE_CAP, so every point maps inside the stationary region.
fn to_params(x: &[f64]) -> GarchParams {
    let (a, b) = (x[2].exp(), x[3].exp());
    let denom = 1.0 + a + b;
    GarchParams {
        rho: x[0].tanh(),
        omega: x[1].exp(),
        alpha: PERSISTENCE_CAP * a / denom,
        beta: PERSISTENCE_CAP * b / denom,
    }
}

fn to_unconstrained(p: &GarchParams) -> [f64; 4] {
    const FLOOR: f64 = 1e-8;
    let rho = p.rho.clamp(-0.999_999, 0.999_999);
    let mut a = (p.alpha / PERSISTENCE_CAP).max(FLOOR);
    let mut b = (p.beta / PERSISTENCE_CAP).max(FLOOR);
    let total = a + b;
    if total > 1.0 - FLOOR {
        a *= (1.0 - FLOOR) / total;
        b *= (1.0 - FLOOR) / total;
    }
    let rest = 1.0 - a - b;
    [rho.atanh(), p.omega.max(1e-12).ln(), (a / rest).ln(), (b / rest).ln()]
}

/// Maximum-likelihood fit over the whole of `returns`.
pub fn fit(returns: &ReturnSeries, options: &FitOptions) -> Result<GarchFit> {
    let values = returns.values();
    if values.len() < options.min_obs.max(2) {
        return Err(Error::InsufficientData { needed: options.min_obs.max(2), got: values.len() });
    }
    let init_variance = stats::sample_variance(values);
    if !stats::has_variation(values) {
        return Err(Error::Degenerate("returns have no variation"));
    }
    let source = options.source;
    let start = options.start.unwrap_or(GarchParams {
        rho: 0.0,
        omega: 0.1 * init_variance,
        alpha: 0.05,
        beta: 0.90,
    });

    let objective = |x: &[f64]| {
        log_likelihood_fast(values, &to_params(x), init_variance, source)
            .map_or(f64::INFINITY, |ll| -ll)
    };
    let x0 = to_unconstrained(&start);
    let tol = Tolerances { f_tol: options.f_tol, x_tol: options.x_tol, max_iter: options.max_iter };

    let quasi_newton = optim::bfgs(objective, &x0, tol);
    let (best, optimizer) = if quasi_newton.converged {
        (quasi_newton, super::Optimizer::Bfgs)
    } else {
        let from = if quasi_newton.value.is_finite() { quasi_newton.x.clone() } else { x0.to_vec() };
        let simplex_tol = Tolerances { max_iter: options.max_iter * 10, ..tol };
        let simplex = optim::nelder_mead(objective, &from, 0.1, simplex_tol);
        if simplex.value <= quasi_newton.value || !quasi_newton.value.is_finite() {
            (simplex, super::Optimizer::NelderMead)
        } else {
            (quasi_newton, super::Optimizer::Bfgs)
        }
    };

    let mut result = GarchFit::evaluate(returns, to_params(&best.x), source)?;
    result.converged = best.converged;
    result.iterations = best.iterations;
    result.optimizer = optimizer;
    if !best.converged {
        return Err(Error::NonConvergence { iterations: best.iterations, best: Box::new(result) });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_round_trip() {
        let p = GarchParams::new(-0.2, 0.05, 0.1, 0.85).unwrap();
        let q = to_params(&to_unconstrained(&p));
        assert!((p.rho - q.rho).abs() < 1e-12);
        assert!((p.omega - q.omega).abs() < 1e-12);
        assert!((p.alpha - q.alpha).abs() < 1e-12);
        assert!((p.beta - q.beta).abs() < 1e-12);
    }

    #[test]
    fn transform_respects_cap() {
        for x in [[0.0, 0.0, 30.0, 30.0], [5.0, -3.0, -40.0, 40.0], [-20.0, 2.0, 0.0, 0.0]] {
            let p = to_params(&x);
            assert!(p.alpha + p.beta < PERSISTENCE_CAP + 1e-15);
            assert!(p.rho.abs() <= 1.0 && p.alpha >= 0.0 && p.beta >= 0.0);
        }
    }
}
