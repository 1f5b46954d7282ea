//! Conditional risk measurement for futures variation margins.
//!
//! Daily percent log returns are modelled as a conditionally normal
//! AR(1)-GARCH(1,1) process. Every risk measure handled here (Value-at-Risk,
//! Expected Shortfall and the exponential spectral risk measure) is then a
//! location-scale transform of its standard-normal value:
//!
//! ```text
//! M(mu_t, sigma_t) = -mu_t + sigma_t * M(0, 1)
//! ```
//!
//! so forecasting reduces to forecasting `(mu_t, sigma_t)` and evaluating
//! `M(0, 1)` once.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command-line pipeline live in the `specmargin` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod backtest;
pub mod bootstrap;
pub mod error;
pub mod garch;
pub mod measures;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod stats;
pub mod timeseries;

pub use error::{Error, Result};
