//! End-to-end processing of one or more contracts.

use std::path::Path;
use std::thread;

use chrono::NaiveDate;
use serde::Serialize;
use specmargin_core::backtest::{self, jarque_bera, BacktestReport, PitSeries};
use specmargin_core::bootstrap::{precision_table, MeanDraws, PrecisionReport};
use specmargin_core::garch::{rolling_forecasts, Forecast, GarchFit, RollingForecasts, WindowKind};
use specmargin_core::measures::{std_normal_measure, ConfidenceLevel, StandardNormalMeasure};
use specmargin_core::quadrature::QuadratureSpec;
use specmargin_core::stats;
use specmargin_core::timeseries::{dependence, log_returns, summarize, DependenceReport, PriceSeries, ReturnSeries, SummaryStats};

use crate::config::RunConfig;
use crate::error::{AppError, Result, Stage};
use crate::io;
use crate::report::{self, Manifest};
use crate::study;

/// One row of the averaged model table: a mean parameter estimate or the
/// mean statistic and p-value of a diagnostic across all forecast days.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticRow {
    pub item: &'static str,
    pub value: f64,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskPathDay {
    pub date: NaiveDate,
    pub mu: f64,
    pub sigma: f64,
    /// One value per risk spec, in config order.
    pub values: Vec<f64>,
    /// Bootstrap CI per risk spec, when daily bands are enabled.
    pub bands: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone)]
pub struct ContractReport {
    pub name: String,
    pub returns: ReturnSeries,
    pub summary: SummaryStats,
    pub dependence: DependenceReport,
    pub rolling: RollingForecasts,
    pub model: Vec<DiagnosticRow>,
    pub risk_paths: Vec<RiskPathDay>,
    /// Bootstrap of the forecast averaged over the evaluation period.
    pub average_forecast: Forecast,
    pub precision: Vec<PrecisionReport>,
    pub pit: PitSeries,
    pub backtest: BacktestReport,
}

/// Evaluates every configured risk spec on the standard normal, once.
pub fn standard_measures(config: &RunConfig) -> Result<Vec<StandardNormalMeasure>> {
    config
        .risk_specs
        .iter()
        .map(|s| std_normal_measure(s).map_err(AppError::stage("*", Stage::Measures)))
        .collect()
}

fn initial_window(returns: &ReturnSeries, config: &RunConfig) -> usize {
    match config.split.evaluation_start {
        Some(start) => returns.dates().partition_point(|d| *d < start),
        None => config.split.window,
    }
}

fn mean_of(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    stats::mean(&v)
}

/// Table-3-style averages over the daily windows: parameters, pre-model
/// dependence of the returns, and post-model diagnostics of the
/// standardized residuals.
fn model_diagnostics(
    returns: &ReturnSeries,
    rolling: &RollingForecasts,
    init_window: usize,
    config: &RunConfig,
) -> std::result::Result<Vec<DiagnosticRow>, specmargin_core::Error> {
    let lag = config.dependence_lag;
    let mut pre = Vec::with_capacity(rolling.len());
    let mut post = Vec::with_capacity(rolling.len());
    let mut info = Vec::with_capacity(rolling.len());
    for (k, params) in rolling.refit_params.iter().enumerate() {
        let t = init_window + k;
        let start = match config.estimation.window {
            WindowKind::Fixed => t - init_window,
            WindowKind::Expanding => 0,
        };
        let window = returns.slice(start..t);
        let fit = GarchFit::evaluate(&window, *params, config.estimation.fit.source)?;
        let z = &fit.std_residuals;
        pre.push(dependence(window.values(), lag)?);
        post.push(dependence(z, lag)?);
        let jb = match (stats::skewness(z), stats::kurtosis(z)) {
            (Some(s), Some(k)) => jarque_bera(s, k, z.len()),
            _ => return Err(specmargin_core::Error::Degenerate("standardized residuals have zero variance")),
        };
        info.push((fit.aic(), fit.bic(), jb));
    }

    let param = |item, f: fn(&specmargin_core::garch::GarchParams) -> f64| DiagnosticRow {
        item,
        value: mean_of(rolling.refit_params.iter().map(f)),
        p_value: None,
    };
    let test = |item, pick: &dyn Fn(usize) -> (f64, f64)| {
        let pairs: Vec<(f64, f64)> = (0..info.len()).map(pick).collect();
        DiagnosticRow {
            item,
            value: mean_of(pairs.iter().map(|p| p.0)),
            p_value: Some(mean_of(pairs.iter().map(|p| p.1))),
        }
    };
    Ok(vec![
        param("rho", |p| p.rho),
        param("omega", |p| p.omega),
        param("alpha", |p| p.alpha),
        param("beta", |p| p.beta),
        test("q_r", &|i| (pre[i].ljung_box_returns.statistic, pre[i].ljung_box_returns.p_value)),
        test("q2_r", &|i| (pre[i].ljung_box_squared.statistic, pre[i].ljung_box_squared.p_value)),
        test("arch_r", &|i| (pre[i].arch_lm.statistic, pre[i].arch_lm.p_value)),
        DiagnosticRow { item: "aic", value: mean_of(info.iter().map(|x| x.0)), p_value: None },
        DiagnosticRow { item: "bic", value: mean_of(info.iter().map(|x| x.1)), p_value: None },
        test("jb_z", &|i| (info[i].2.statistic, info[i].2.p_value)),
        test("q_z", &|i| (post[i].ljung_box_returns.statistic, post[i].ljung_box_returns.p_value)),
        test("q2_z", &|i| (post[i].ljung_box_squared.statistic, post[i].ljung_box_squared.p_value)),
        test("arch_z", &|i| (post[i].arch_lm.statistic, post[i].arch_lm.p_value)),
    ])
}

/// Runs the full pipeline on one price series.
pub fn run_contract(
    name: &str,
    prices: &PriceSeries,
    measures: &[StandardNormalMeasure],
    config: &RunConfig,
) -> Result<ContractReport> {
    let at = |stage| AppError::stage(name, stage);
    let returns = log_returns(prices);
    if returns.len() < 2 {
        return Err(at(Stage::Returns)(specmargin_core::Error::InsufficientData { needed: 2, got: returns.len() }));
    }
    let summary = summarize(returns.values()).map_err(at(Stage::Summary))?;
    let dep = dependence(returns.values(), config.dependence_lag).map_err(at(Stage::Summary))?;

    let init_window = initial_window(&returns, config);
    if init_window < config.estimation.fit.min_obs {
        return Err(at(Stage::Fit)(specmargin_core::Error::InsufficientData {
            needed: config.estimation.fit.min_obs,
            got: init_window,
        }));
    }
    let rolling = rolling_forecasts(&returns, &config.rolling_options(init_window)).map_err(at(Stage::Fit))?;
    let model = model_diagnostics(&returns, &rolling, init_window, config).map_err(at(Stage::Diagnostics))?;

    let boot = config.bootstrap_config();
    let mut risk_paths = Vec::with_capacity(rolling.len());
    for (i, f) in rolling.forecasts.iter().enumerate() {
        let values = measures.iter().map(|m| m.scale(f.mu, f.sigma)).collect();
        let bands = if config.bootstrap.daily_bands {
            let sd = specmargin_core::bootstrap::calibrate_mu_sd(f, &boot);
            let draws = MeanDraws::generate(sd, &boot, i as u64).map_err(at(Stage::Bootstrap))?;
            Some(measures.iter().map(|m| draws.report(m, f, &boot).ci).collect())
        } else {
            None
        };
        risk_paths.push(RiskPathDay { date: f.date, mu: f.mu, sigma: f.sigma, values, bands });
    }

    let average_forecast = Forecast::average(&rolling.forecasts)
        .ok_or_else(|| at(Stage::Bootstrap)(specmargin_core::Error::InsufficientData { needed: 1, got: 0 }))?;
    let precision = precision_table(&[average_forecast], measures, &boot)
        .map_err(at(Stage::Bootstrap))?
        .into_iter()
        .map(|row| row.report)
        .collect();

    let alpha = ConfidenceLevel::new(config.backtest.alpha).map_err(at(Stage::Backtest))?;
    let pit = backtest::pit(&returns, &rolling.forecasts).map_err(at(Stage::Backtest))?;
    let report = backtest::backtest_with(&returns, &rolling.forecasts, alpha, config.backtest.kupiec_variant)
        .map_err(at(Stage::Backtest))?;

    Ok(ContractReport {
        name: name.to_string(),
        returns,
        summary,
        dependence: dep,
        rolling,
        model,
        risk_paths,
        average_forecast,
        precision,
        pit,
        backtest: report,
    })
}

/// Outcome of a multi-contract run.
#[derive(Debug)]
pub struct RunOutcome {
    pub contracts: Vec<ContractReport>,
    pub manifest: Manifest,
    pub failures: Vec<AppError>,
}

/// Loads, processes and writes every configured contract. Contracts run on
/// their own threads; outputs are written per contract, then the manifest.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate(true)?;
    let measures = standard_measures(config)?;
    let out_dir = config.output_dir.as_path();
    io::create_dir(out_dir)?;

    let results: Vec<Result<ContractReport>> = thread::scope(|scope| {
        let handles: Vec<_> = config
            .inputs
            .iter()
            .map(|input| {
                let measures = &measures;
                scope.spawn(move || {
                    let prices = io::load_prices(&input.path, &config.columns).map_err(|e| match e {
                        AppError::Stage { source, stage, .. } => {
                            AppError::Stage { contract: input.name.clone(), stage, source }
                        }
                        other => other,
                    })?;
                    let report = run_contract(&input.name, &prices, measures, config)?;
                    report::write_contract(out_dir, &report, config)?;
                    Ok(report)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("contract thread panicked")).collect()
    });

    let mut contracts = Vec::new();
    let mut failures = Vec::new();
    let mut statuses = Vec::new();
    for (input, result) in config.inputs.iter().zip(results) {
        match result {
            Ok(report) => {
                statuses.push(report::ContractStatus::ok(&input.name, report::contract_files(&input.name)));
                contracts.push(report);
            }
            Err(e) => {
                statuses.push(report::ContractStatus::failed(&input.name, &e));
                failures.push(e);
            }
        }
    }
    let mut manifest = Manifest::new(config, statuses);
    if config.studies.table1 {
        report::write_table1(&out_dir.join(report::TABLE1), &study::table1(QuadratureSpec::default())?)?;
        manifest.files.push(report::TABLE1.into());
    }
    if config.studies.convergence {
        let rows = study::convergence_study(&study::ConvergenceStudy::default())?;
        report::write_convergence(&out_dir.join(report::CONVERGENCE), &rows)?;
        manifest.files.push(report::CONVERGENCE.into());
    }
    manifest.write(&out_dir.join(report::MANIFEST))?;
    Ok(RunOutcome { contracts, manifest, failures })
}

/// Backtests stored forecasts against the returns of a price file.
pub fn backtest_only(
    name: &str,
    prices: &Path,
    forecasts: &Path,
    config: &RunConfig,
) -> Result<(BacktestReport, PitSeries)> {
    let at = |stage| AppError::stage(name, stage);
    let prices = io::load_prices(prices, &config.columns)?;
    let returns = log_returns(&prices);
    let forecasts = io::read_forecasts(forecasts)?;
    let alpha = ConfidenceLevel::new(config.backtest.alpha).map_err(at(Stage::Backtest))?;
    let pit = backtest::pit(&returns, &forecasts).map_err(at(Stage::Backtest))?;
    let report = backtest::backtest_with(&returns, &forecasts, alpha, config.backtest.kupiec_variant)
        .map_err(at(Stage::Backtest))?;
    Ok((report, pit))
}
