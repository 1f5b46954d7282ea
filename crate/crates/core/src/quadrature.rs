//! Numerical integration over the unit interval.
//!
//! The integrands of interest involve the standard normal quantile `z_p`,
//! which diverges at both endpoints. The deterministic rules therefore work
//! on the truncated interval `[1/N, 1 - 1/N]` split into `N - 2` panels of
//! width `1/N`; nodes are `i/N` for `i = 1..N-1`. The missing end slices
//! carry the truncation error, which shrinks as `N` grows, so the estimate
//! of a positive tail-loaded integral converges upwards.
//!
//! The sampling methods average `f` over `N` points in the open interval:
//! the base-2 radical inverse (van der Corput, the one-dimensional
//! Niederreiter sequence), the Weyl sequence `frac(i * sqrt(2))`, or
//! pseudo-random uniforms.

#[allow(unused_imports)]
use num_traits::Float;

use crate::rng::NormalStream;
use crate::{Error, Result};

pub const DEFAULT_SLICES: usize = 30_000;

const ENDPOINT_NUDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    #[default]
    Trapezoid,
    Simpson,
    Niederreiter,
    Weyl,
    PseudoMc,
}

impl Method {
    pub const ALL: [Method; 5] =
        [Method::Trapezoid, Method::Simpson, Method::Niederreiter, Method::Weyl, Method::PseudoMc];

    pub fn name(self) -> &'static str {
        match self {
            Method::Trapezoid => "trapezoid",
            Method::Simpson => "simpson",
            Method::Niederreiter => "niederreiter",
            Method::Weyl => "weyl",
            Method::PseudoMc => "pseudo_mc",
        }
    }

    pub fn from_name(name: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == name)
    }

    /// Whether the method is a weighted rule on the truncated uniform grid.
    pub fn is_grid_rule(self) -> bool {
        matches!(self, Method::Trapezoid | Method::Simpson)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct QuadratureSpec {
    pub method: Method,
    /// `N`: grid resolution for the rules, point count for the samplers.
    pub slices: usize,
    /// Only read by [`Method::PseudoMc`].
    pub seed: Option<u64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { method: Method::Trapezoid, slices: DEFAULT_SLICES, seed: None }
    }
}

impl QuadratureSpec {
    pub fn new(method: Method, slices: usize) -> Result<Self> {
        let spec = Self { method, slices, seed: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn trapezoid(slices: usize) -> Self {
        Self { method: Method::Trapezoid, slices, seed: None }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.slices < 2 {
            return Err(Error::InvalidParameter(alloc::format!(
                "quadrature needs at least 2 slices, got {}",
                self.slices
            )));
        }
        if self.method == Method::Simpson && self.slices % 2 == 1 {
            return Err(Error::InvalidParameter(alloc::format!(
                "Simpson's rule needs an even panel count; N = {} gives {} panels",
                self.slices,
                self.slices.saturating_sub(2)
            )));
        }
        Ok(())
    }

    /// Length of the sub-interval the rule actually integrates over:
    /// `1 - 2/N` for the grid rules, 1 for the samplers.
    pub fn covered_measure(&self) -> f64 {
        if self.method.is_grid_rule() {
            1.0 - 2.0 / self.slices as f64
        } else {
            1.0
        }
    }
}

/// Neumaier-compensated running sum, so results do not depend on how many
/// terms were accumulated in which order within a block.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Base-2 radical inverse of `i`.
pub fn van_der_corput(mut i: u64) -> f64 {
    let mut x = 0.0;
    let mut scale = 0.5;
    while i > 0 {
        if i & 1 == 1 {
            x += scale;
        }
        i >>= 1;
        scale *= 0.5;
    }
    x
}

/// `frac(i * sqrt(2))`.
pub fn weyl(i: u64) -> f64 {
    let x = i as f64 * core::f64::consts::SQRT_2;
    x - x.floor()
}

fn nudge(p: f64) -> f64 {
    p.clamp(ENDPOINT_NUDGE, 1.0 - ENDPOINT_NUDGE)
}

/// Integrates `f` over (0, 1) with the configured method.
///
/// Fails on an invalid spec or when `f` returns a non-finite value.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let n = spec.slices;
    let mut acc = CompensatedSum::default();
    let mut eval = |p: f64, weight: f64, acc: &mut CompensatedSum| -> Result<()> {
        let v = f(p);
        if !v.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "integrand is not finite at p = {p}"
            )));
        }
        acc.add(weight * v);
        Ok(())
    };

    let nf = n as f64;
    match spec.method {
        Method::Trapezoid | Method::Simpson if n < 3 => return Ok(0.0),
        Method::Trapezoid => {
            for i in 1..n {
                let w = if i == 1 || i == n - 1 { 0.5 } else { 1.0 };
                eval(i as f64 / nf, w, &mut acc)?;
            }
            Ok(acc.total() / nf)
        }
        Method::Simpson => {
            for i in 1..n {
                let w = if i == 1 || i == n - 1 {
                    1.0
                } else if (i - 1) % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                eval(i as f64 / nf, w, &mut acc)?;
            }
            Ok(acc.total() / (3.0 * nf))
        }
        Method::Niederreiter => {
            for i in 1..=n as u64 {
                eval(nudge(van_der_corput(i)), 1.0, &mut acc)?;
            }
            Ok(acc.total() / nf)
        }
        Method::Weyl => {
            for i in 1..=n as u64 {
                eval(nudge(weyl(i)), 1.0, &mut acc)?;
            }
            Ok(acc.total() / nf)
        }
        Method::PseudoMc => {
            let mut stream = NormalStream::new(spec.seed.unwrap_or(0), 0);
            for _ in 0..n {
                eval(nudge(stream.next_uniform()), 1.0, &mut acc)?;
            }
            Ok(acc.total() / nf)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand() {
        for method in Method::ALL {
            for n in [4, 10, 1000, 30_000] {
                let spec = QuadratureSpec { method, slices: n, seed: Some(1) };
                let v = integrate(|_| 1.0, &spec).unwrap();
                // exact over the covered sub-interval; the grid rules omit
                // one slice of width 1/N at each end
                assert!((v - spec.covered_measure()).abs() < 1e-9, "{method:?} {n}: {v}");
                if !method.is_grid_rule() || n >= 2000 {
                    assert!((v - 1.0).abs() < 1e-3);
                }
            }
        }
    }

    #[test]
    fn linear_integrand_trapezoid() {
        let v = integrate(|p| p, &QuadratureSpec::trapezoid(10_000)).unwrap();
        assert!((v - 0.5).abs() <= 1e-4);
    }

    #[test]
    fn simpson_exact_for_cubics_on_covered_interval() {
        let n = 10;
        let (a, b) = (0.1f64, 0.9f64);
        let exact = (b.powi(4) - a.powi(4)) / 4.0;
        let v = integrate(|p| p * p * p, &QuadratureSpec::new(Method::Simpson, n).unwrap()).unwrap();
        assert!((v - exact).abs() < 1e-14);
    }

    #[test]
    fn simpson_rejects_odd_panels() {
        assert!(QuadratureSpec::new(Method::Simpson, 31).is_err());
        assert!(integrate(|_| 1.0, &QuadratureSpec { method: Method::Simpson, slices: 7, seed: None })
            .is_err());
        assert!(QuadratureSpec::new(Method::Trapezoid, 1).is_err());
    }

    #[test]
    fn sequences() {
        assert_eq!(van_der_corput(1), 0.5);
        assert_eq!(van_der_corput(2), 0.25);
        assert_eq!(van_der_corput(3), 0.75);
        assert_eq!(van_der_corput(6), 0.375);
        assert!((weyl(1) - (core::f64::consts::SQRT_2 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let spec = QuadratureSpec::trapezoid(10);
        assert!(integrate(|p| if p > 0.5 { f64::NAN } else { 0.0 }, &spec).is_err());
    }

    #[test]
    fn pseudo_mc_seed_matters() {
        let a = integrate(|p| p * p, &QuadratureSpec { method: Method::PseudoMc, slices: 500, seed: Some(1) });
        let b = integrate(|p| p * p, &QuadratureSpec { method: Method::PseudoMc, slices: 500, seed: Some(2) });
        assert_ne!(a.unwrap(), b.unwrap());
    }
}
