//! Output files and the run manifest.

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{AppError, Result};
use crate::io::{self, ForecastRow};
use crate::pipeline::ContractReport;
use crate::study::{ConvergenceRow, Table1Row};

pub const MANIFEST: &str = "manifest.json";
pub const TABLE1: &str = "table1.csv";
pub const CONVERGENCE: &str = "convergence.csv";

pub const CONTRACT_FILES: [&str; 9] = [
    "returns.csv",
    "summary.csv",
    "params.csv",
    "forecasts.csv",
    "risk_paths.csv",
    "precision.csv",
    "pit.csv",
    "backtest.json",
    "fit_failures.csv",
];

/// Manifest paths (relative to the output directory) of one contract.
pub fn contract_files(name: &str) -> Vec<String> {
    CONTRACT_FILES.iter().map(|f| format!("{name}/{f}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractStatus {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub files: Vec<String>,
}

impl ContractStatus {
    pub fn ok(name: &str, files: Vec<String>) -> Self {
        Self { name: name.into(), status: "ok".into(), error: None, files }
    }

    pub fn failed(name: &str, error: &AppError) -> Self {
        Self { name: name.into(), status: "failed".into(), error: Some(error.to_string()), files: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub config: RunConfig,
    pub contracts: Vec<ContractStatus>,
    /// Study outputs not tied to a contract.
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(config: &RunConfig, contracts: Vec<ContractStatus>) -> Self {
        Self { seed: config.seed, config: config.clone(), contracts, files: Vec::new() }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_json(path, self)
    }

    /// Every file path the manifest references.
    pub fn all_files(&self) -> impl Iterator<Item = &String> {
        self.contracts.iter().flat_map(|c| c.files.iter()).chain(self.files.iter())
    }
}

#[derive(Serialize)]
struct ReturnRow {
    date: NaiveDate,
    #[serde(rename = "return")]
    value: f64,
}

#[derive(Serialize)]
struct StatRow<'a> {
    statistic: &'a str,
    value: f64,
    p_value: Option<f64>,
}

#[derive(Serialize)]
struct PrecisionRow<'a> {
    measure: &'a str,
    estimate: f64,
    se: f64,
    st_se: f64,
    ci_lb: f64,
    ci_ub: f64,
    st_ci_lb: f64,
    st_ci_ub: f64,
}

#[derive(Serialize)]
struct PitRow {
    date: NaiveDate,
    pit: f64,
}

#[derive(Serialize)]
struct FailureRow<'a> {
    date: NaiveDate,
    error: &'a str,
}

fn summary_rows(report: &ContractReport) -> Vec<StatRow<'static>> {
    let s = &report.summary;
    let d = &report.dependence;
    let nan = f64::NAN;
    vec![
        StatRow { statistic: "n", value: s.n as f64, p_value: None },
        StatRow { statistic: "mean", value: s.mean, p_value: None },
        StatRow { statistic: "std_dev", value: s.std_dev, p_value: None },
        StatRow { statistic: "skewness", value: s.skewness.unwrap_or(nan), p_value: None },
        StatRow { statistic: "kurtosis", value: s.kurtosis.unwrap_or(nan), p_value: None },
        StatRow { statistic: "minimum", value: s.minimum, p_value: None },
        StatRow { statistic: "maximum", value: s.maximum, p_value: None },
        StatRow { statistic: "q", value: d.ljung_box_returns.statistic, p_value: Some(d.ljung_box_returns.p_value) },
        StatRow { statistic: "q2", value: d.ljung_box_squared.statistic, p_value: Some(d.ljung_box_squared.p_value) },
        StatRow { statistic: "arch", value: d.arch_lm.statistic, p_value: Some(d.arch_lm.p_value) },
    ]
}

fn risk_path_table(report: &ContractReport, config: &RunConfig) -> (Vec<String>, Vec<Vec<String>>) {
    let labels: Vec<String> = config.risk_specs.iter().map(|s| s.label()).collect();
    let mut header = vec!["date".to_string(), "mu".into(), "sigma".into()];
    for label in &labels {
        header.push(label.clone());
        if config.bootstrap.daily_bands {
            header.push(format!("{label}_ci_lb"));
            header.push(format!("{label}_ci_ub"));
        }
    }
    let rows = report
        .risk_paths
        .iter()
        .map(|day| {
            let mut row = vec![day.date.to_string(), day.mu.to_string(), day.sigma.to_string()];
            for (j, v) in day.values.iter().enumerate() {
                row.push(v.to_string());
                if let Some(bands) = &day.bands {
                    row.push(bands[j].0.to_string());
                    row.push(bands[j].1.to_string());
                }
            }
            row
        })
        .collect();
    (header, rows)
}

/// Writes `<out>/<contract>/...`.
pub fn write_contract(out_dir: &Path, report: &ContractReport, config: &RunConfig) -> Result<()> {
    let dir = out_dir.join(&report.name);
    io::create_dir(&dir)?;

    let returns = report.returns.dates().iter().zip(report.returns.values());
    io::write_csv(&dir.join("returns.csv"), returns.map(|(&date, &value)| ReturnRow { date, value }))?;
    io::write_csv(&dir.join("summary.csv"), summary_rows(report))?;
    io::write_csv(
        &dir.join("params.csv"),
        report.model.iter().map(|r| StatRow { statistic: r.item, value: r.value, p_value: r.p_value }),
    )?;

    let rolling = &report.rolling;
    let forecasts = rolling.forecasts.iter().zip(&rolling.diagnostics).map(|(f, d)| ForecastRow {
        date: f.date,
        rho: f.source_params.rho,
        omega: f.source_params.omega,
        alpha: f.source_params.alpha,
        beta: f.source_params.beta,
        loglik: d.log_likelihood,
        mu: f.mu,
        sigma: f.sigma,
        refit: d.refit,
        converged: d.converged,
        error: d.error.clone(),
    });
    io::write_csv(&dir.join("forecasts.csv"), forecasts)?;

    let (header, rows) = risk_path_table(report, config);
    io::write_records(&dir.join("risk_paths.csv"), &header, &rows)?;

    io::write_csv(
        &dir.join("precision.csv"),
        report.precision.iter().map(|p| PrecisionRow {
            measure: &p.measure,
            estimate: p.estimate,
            se: p.se,
            st_se: p.st_se,
            ci_lb: p.ci.0,
            ci_ub: p.ci.1,
            st_ci_lb: p.st_ci.0,
            st_ci_ub: p.st_ci.1,
        }),
    )?;

    write_pit(&dir.join("pit.csv"), &report.pit)?;
    io::write_json(&dir.join("backtest.json"), &report.backtest)?;

    let failures = rolling
        .diagnostics
        .iter()
        .filter_map(|d| d.error.as_deref().map(|error| FailureRow { date: d.date, error }));
    write_csv_with_header(&dir.join("fit_failures.csv"), &["date", "error"], failures)
}

pub fn write_pit(path: &Path, pit: &specmargin_core::backtest::PitSeries) -> Result<()> {
    let rows = pit.dates.iter().zip(&pit.values).map(|(&date, &pit)| PitRow { date, pit });
    write_csv_with_header(path, &["date", "pit"], rows)
}

/// Like [`io::write_csv`], but still writes the header when there are no rows.
fn write_csv_with_header<T: Serialize>(path: &Path, header: &[&str], rows: impl Iterator<Item = T>) -> Result<()> {
    let csv_err = |source| AppError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| AppError::Io { path: path.to_path_buf(), source })
}

pub fn write_table1(path: &Path, rows: &[Table1Row]) -> Result<()> {
    io::write_csv(path, rows)
}

pub fn write_convergence(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    io::write_csv(path, rows)
}
