//! Run configuration, read from a single JSON document.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use specmargin_core::backtest::KupiecVariant;
use specmargin_core::bootstrap::{BootstrapConfig, Calibration, CiMethod};
use specmargin_core::garch::{FitOptions, RollingOptions, WindowKind};
use specmargin_core::measures::{ConfidenceLevel, RiskSpec};

use crate::error::{AppError, Result};
use crate::io::ColumnSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Split {
    /// Returns in each estimation window.
    pub window: usize,
    /// First forecast date. When set, every return before it goes into the
    /// first window and `window` is ignored.
    pub evaluation_start: Option<NaiveDate>,
}

impl Default for Split {
    fn default() -> Self {
        Self { window: 523, evaluation_start: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Estimation {
    pub refit_every: usize,
    pub window: WindowKind,
    pub warm_start: bool,
    pub fit: FitOptions,
}

impl Default for Estimation {
    fn default() -> Self {
        let r = RollingOptions::default();
        Self { refit_every: r.refit_every, window: r.window, warm_start: r.warm_start, fit: r.fit }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BacktestSettings {
    pub alpha: f64,
    pub kupiec_variant: KupiecVariant,
}

impl Default for BacktestSettings {
    fn default() -> Self {
        Self { alpha: 0.95, kupiec_variant: KupiecVariant::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapSettings {
    pub replications: usize,
    pub calibration: Calibration,
    pub ci_method: CiMethod,
    pub ci_level: f64,
    /// Also bootstrap every forecast day for the CI bands in `risk_paths.csv`.
    pub daily_bands: bool,
}

impl Default for BootstrapSettings {
    fn default() -> Self {
        let b = BootstrapConfig::default();
        Self {
            replications: b.replications,
            calibration: b.calibration,
            ci_method: b.ci_method,
            ci_level: b.ci_level,
            daily_bands: true,
        }
    }
}

/// Standalone studies written next to the contract outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Studies {
    pub table1: bool,
    pub convergence: bool,
}

impl Default for Studies {
    fn default() -> Self {
        Self { table1: true, convergence: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub inputs: Vec<InputFile>,
    pub columns: ColumnSpec,
    pub split: Split,
    pub estimation: Estimation,
    pub risk_specs: Vec<RiskSpec>,
    pub backtest: BacktestSettings,
    pub bootstrap: BootstrapSettings,
    /// Lag for the Ljung-Box and ARCH-LM diagnostics.
    pub dependence_lag: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Abort on the first failed refit.
    pub strict: bool,
    pub studies: Studies,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            columns: ColumnSpec::default(),
            split: Split::default(),
            estimation: Estimation::default(),
            risk_specs: default_risk_specs(),
            backtest: BacktestSettings::default(),
            bootstrap: BootstrapSettings::default(),
            dependence_lag: specmargin_core::timeseries::DEFAULT_LAG,
            output_dir: PathBuf::from("out"),
            seed: 0,
            strict: false,
            studies: Studies::default(),
        }
    }
}

pub fn default_risk_specs() -> Vec<RiskSpec> {
    vec![
        RiskSpec::var(0.95).expect("valid level"),
        RiskSpec::es(0.95).expect("valid level"),
        RiskSpec::spectral(50.0).expect("valid aversion"),
    ]
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| AppError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text).map_err(|e| match e {
            AppError::Config(msg) => AppError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| AppError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks everything that can be checked before touching any data.
    pub fn validate(&self, require_inputs: bool) -> Result<()> {
        let bad = |msg: String| Err(AppError::Config(msg));
        if require_inputs && self.inputs.is_empty() {
            return bad("no input files".into());
        }
        let mut names: Vec<&str> = self.inputs.iter().map(|i| i.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return bad("input names must be unique".into());
        }
        if let Some(name) = names.iter().find(|n| n.is_empty() || n.contains(['/', '\\']) || **n == "..") {
            return bad(format!("input name `{name}` cannot be used as a directory name"));
        }
        if self.risk_specs.is_empty() {
            return bad("at least one risk spec is required".into());
        }
        for spec in &self.risk_specs {
            if let RiskSpec::Spectral { quadrature, .. } = spec {
                quadrature.validate().map_err(|e| AppError::Config(e.to_string()))?;
            }
        }
        let min_obs = self.estimation.fit.min_obs;
        if self.split.evaluation_start.is_none() && self.split.window < min_obs {
            return bad(format!("window {} is shorter than the minimum fit size {min_obs}", self.split.window));
        }
        if self.estimation.refit_every == 0 {
            return bad("refit_every must be at least 1".into());
        }
        ConfidenceLevel::new(self.backtest.alpha).map_err(|e| AppError::Config(e.to_string()))?;
        if self.dependence_lag == 0 {
            return bad("dependence_lag must be positive".into());
        }
        self.bootstrap_config().validate().map_err(|e| AppError::Config(e.to_string()))
    }

    pub fn bootstrap_config(&self) -> BootstrapConfig {
        BootstrapConfig {
            replications: self.bootstrap.replications,
            seed: self.seed,
            calibration: self.bootstrap.calibration,
            ci_method: self.bootstrap.ci_method,
            ci_level: self.bootstrap.ci_level,
        }
    }

    pub fn rolling_options(&self, init_window: usize) -> RollingOptions {
        RollingOptions {
            init_window,
            refit_every: self.estimation.refit_every,
            window: self.estimation.window,
            warm_start: self.estimation.warm_start,
            strict: self.strict,
            fit: self.estimation.fit,
        }
    }
}
