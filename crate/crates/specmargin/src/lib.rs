//! Files, configuration and the command-line pipeline around
//! [`specmargin_core`].
//!
//! A run reads daily closing prices per contract, rolls AR(1)-GARCH(1,1)
//! forecasts over an evaluation period, and writes risk paths, bootstrap
//! precision tables and backtests under `<out>/<contract>/`, indexed by
//! `<out>/manifest.json`.

pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod study;

pub use config::RunConfig;
pub use error::{AppError, Result};
pub use specmargin_core as core;
