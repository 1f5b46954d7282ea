//! CSV price input and CSV/JSON output.

use std::fs::{self, File};
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use specmargin_core::garch::{Forecast, GarchParams};
use specmargin_core::timeseries::PriceSeries;

use crate::error::{AppError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnSpec {
    pub date: String,
    pub close: String,
    /// chrono format string; ISO dates by default.
    pub date_format: String,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self { date: "date".into(), close: "close".into(), date_format: "%Y-%m-%d".into() }
    }
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers.iter().position(|h| h.trim() == name).ok_or_else(|| AppError::Stage {
        contract: path.display().to_string(),
        stage: crate::error::Stage::Load,
        source: specmargin_core::Error::InvalidRow { row: 0, reason: format!("missing column `{name}`") },
    })
}

/// Reads `(date, close)` rows. Rows are numbered from 1 after the header.
pub fn read_prices<R: Read>(reader: R, columns: &ColumnSpec, path: &Path) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let csv_err = |source| AppError::Csv { path: path.to_path_buf(), source };
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let date_col = column(&headers, &columns.date, path)?;
    let close_col = column(&headers, &columns.close, path)?;
    let load_err = |row: usize, reason: String| AppError::Stage {
        contract: path.display().to_string(),
        stage: crate::error::Stage::Load,
        source: specmargin_core::Error::InvalidRow { row, reason },
    };

    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(csv_err)?;
        let date_text = record.get(date_col).unwrap_or("");
        let date = NaiveDate::parse_from_str(date_text, &columns.date_format)
            .map_err(|e| load_err(row, format!("bad date `{date_text}`: {e}")))?;
        let close_text = record.get(close_col).unwrap_or("");
        let close: f64 =
            close_text.parse().map_err(|_| load_err(row, format!("bad price `{close_text}`")))?;
        rows.push((date, close));
    }
    PriceSeries::new(rows).map_err(AppError::stage(&path.display().to_string(), crate::error::Stage::Load))
}

pub fn load_prices(path: &Path, columns: &ColumnSpec) -> Result<PriceSeries> {
    let file = File::open(path).map_err(|source| AppError::Io { path: path.to_path_buf(), source })?;
    read_prices(file, columns, path)
}

pub fn write_prices(path: &Path, prices: &PriceSeries) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        date: NaiveDate,
        close: f64,
    }
    write_csv(path, prices.iter().map(|(date, close)| Row { date, close }))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| AppError::Io { path: path.to_path_buf(), source })
}

pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let csv_err = |source| AppError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| AppError::Io { path: path.to_path_buf(), source })
}

/// Writes a CSV with a header computed at run time.
pub fn write_records(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let csv_err = |source| AppError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| AppError::Io { path: path.to_path_buf(), source })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|source| AppError::Json { path: path.to_path_buf(), source })?;
    text.push('\n');
    let mut file = File::create(path).map_err(|source| AppError::Io { path: path.to_path_buf(), source })?;
    file.write_all(text.as_bytes()).map_err(|source| AppError::Io { path: path.to_path_buf(), source })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| AppError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| AppError::Json { path: path.to_path_buf(), source })
}

/// One line of `forecasts.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRow {
    pub date: NaiveDate,
    pub rho: f64,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub loglik: f64,
    pub mu: f64,
    pub sigma: f64,
    #[serde(default)]
    pub refit: bool,
    #[serde(default = "yes")]
    pub converged: bool,
    #[serde(default)]
    pub error: Option<String>,
}

fn yes() -> bool {
    true
}

impl ForecastRow {
    pub fn to_forecast(&self) -> std::result::Result<Forecast, specmargin_core::Error> {
        Ok(Forecast {
            date: self.date,
            mu: self.mu,
            sigma: self.sigma,
            source_params: GarchParams::new(self.rho, self.omega, self.alpha, self.beta)?,
        })
    }
}

pub fn read_forecasts(path: &Path) -> Result<Vec<Forecast>> {
    let csv_err = |source| AppError::Csv { path: path.to_path_buf(), source };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<ForecastRow>().enumerate() {
        let row = row.map_err(csv_err)?;
        let forecast = row.to_forecast().map_err(|e| AppError::Stage {
            contract: path.display().to_string(),
            stage: crate::error::Stage::Load,
            source: specmargin_core::Error::InvalidRow { row: i + 1, reason: e.to_string() },
        })?;
        out.push(forecast);
    }
    Ok(out)
}
