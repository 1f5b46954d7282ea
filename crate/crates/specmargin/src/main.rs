use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};
use specmargin::config::InputFile;
use specmargin::error::{AppError, Stage};
use specmargin::study::{self, ConvergenceStudy};
use specmargin::{io, pipeline, report, RunConfig};
use specmargin_core::garch::{simulate, synthetic_prices, GarchParams, VarianceSource};
use specmargin_core::measures::RiskAversion;
use specmargin_core::quadrature::{Method, QuadratureSpec};

#[derive(Parser)]
#[command(name = "specmargin", version, about = "Conditional VaR, ES and spectral risk forecasts for variation margins")]
struct Cli {
    /// JSON run configuration; defaults are used for anything it omits.
    #[arg(long, global = true, env = "SPECMARGIN_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "SPECMARGIN_SEED")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "SPECMARGIN_OUT")]
    out: Option<PathBuf>,
    /// Abort on the first failed refit instead of carrying estimates forward.
    #[arg(long, global = true, env = "SPECMARGIN_STRICT")]
    strict: bool,
    /// Print the effective configuration as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit, forecast, bootstrap and backtest every configured contract.
    Run {
        /// Extra input as NAME=PATH; may be repeated.
        #[arg(long = "input", value_parser = parse_input)]
        inputs: Vec<InputFile>,
    },
    /// Standard-normal VaR, ES and spectral measures.
    Table1 {
        #[arg(long, default_value_t = 30_000)]
        slices: usize,
    },
    /// Spectral-measure estimates against the number of slices, per method.
    Convergence {
        #[arg(long, default_value_t = 50.0)]
        k: f64,
        #[arg(long, default_value_t = 100)]
        step: usize,
        #[arg(long, default_value_t = 50_000)]
        max: usize,
        /// Comma-separated: trapezoid, simpson, niederreiter, weyl, pseudo_mc.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        /// Number of pseudo-random seeds, starting at --seed.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
    },
    /// Backtest stored forecasts against realized returns.
    BacktestOnly {
        #[arg(long)]
        prices: PathBuf,
        /// A `forecasts.csv` written by `run`.
        #[arg(long)]
        forecasts: PathBuf,
        #[arg(long, default_value = "backtest")]
        name: String,
    },
    /// Write a synthetic AR(1)-GARCH(1,1) price series.
    Simulate {
        #[arg(long)]
        file: PathBuf,
        /// Number of returns; the file has one more price.
        #[arg(long, default_value_t = 782)]
        days: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        rho: f64,
        #[arg(long, default_value_t = 0.05)]
        omega: f64,
        #[arg(long, default_value_t = 0.08)]
        alpha: f64,
        #[arg(long, default_value_t = 0.9)]
        beta: f64,
        #[arg(long, default_value = "2000-01-03")]
        start: NaiveDate,
    },
}

fn parse_input(s: &str) -> Result<InputFile, String> {
    let (name, path) = s.split_once('=').ok_or_else(|| format!("expected NAME=PATH, got `{s}`"))?;
    Ok(InputFile { name: name.to_string(), path: PathBuf::from(path) })
}

fn load_config(cli: &Cli) -> Result<RunConfig, AppError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    config.strict |= cli.strict;
    if let Some(Command::Run { inputs }) = &cli.command {
        config.inputs.extend(inputs.iter().cloned());
    }
    Ok(config)
}

fn execute(cli: Cli) -> Result<(), AppError> {
    let config = load_config(&cli)?;
    if cli.print_config {
        println!("{}", config.to_json());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(AppError::Config("no subcommand given; see --help".into()));
    };
    match command {
        Command::Run { .. } => {
            let outcome = pipeline::run(&config)?;
            for c in &outcome.contracts {
                let b = &c.backtest;
                println!(
                    "{}: {} forecasts, {} exceedances, kupiec p = {:.4}, {} refit failures",
                    c.name,
                    c.rolling.len(),
                    b.exceedances,
                    b.p_values.kupiec,
                    c.rolling.failures()
                );
            }
            println!("wrote {}", config.output_dir.join(report::MANIFEST).display());
            match outcome.failures.into_iter().next() {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
        Command::Table1 { slices } => {
            let quadrature = QuadratureSpec::trapezoid(slices);
            quadrature.validate().map_err(|e| AppError::Config(e.to_string()))?;
            let rows = study::table1(quadrature)?;
            println!("{:>6} {:>8} {:>8} {:>6} {:>8}", "alpha", "VaR", "ES", "k", "SRM");
            for r in &rows {
                println!("{:>6} {:>8.4} {:>8.4} {:>6} {:>8.4}", r.alpha, r.var, r.es, r.k, r.srm);
            }
            if cli.out.is_some() {
                io::create_dir(&config.output_dir)?;
                report::write_table1(&config.output_dir.join(report::TABLE1), &rows)?;
            }
            Ok(())
        }
        Command::Convergence { k, step, max, methods, seeds } => {
            if step == 0 || max < step {
                return Err(AppError::Config("need 0 < step <= max".into()));
            }
            let methods = match methods {
                None => Method::ALL.to_vec(),
                Some(names) => names
                    .iter()
                    .map(|n| Method::from_name(n).ok_or_else(|| AppError::Config(format!("unknown method `{n}`"))))
                    .collect::<Result<_, _>>()?,
            };
            let study = ConvergenceStudy {
                k: RiskAversion::new(k).map_err(|e| AppError::Config(e.to_string()))?,
                grid: (1..=max / step).map(|i| i * step).collect(),
                methods,
                seeds: (config.seed..config.seed + seeds).collect(),
            };
            let rows = study::convergence_study(&study)?;
            io::create_dir(&config.output_dir)?;
            let path = config.output_dir.join(report::CONVERGENCE);
            report::write_convergence(&path, &rows)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
            Ok(())
        }
        Command::BacktestOnly { prices, forecasts, name } => {
            config.validate(false)?;
            let (report, pit) = pipeline::backtest_only(&name, &prices, &forecasts, &config)?;
            let dir = config.output_dir.join(&name);
            io::create_dir(&dir)?;
            io::write_json(&dir.join("backtest.json"), &report)?;
            report::write_pit(&dir.join("pit.csv"), &pit)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(())
        }
        Command::Simulate { file, days, rho, omega, alpha, beta, start } => {
            let params = GarchParams::new(rho, omega, alpha, beta).map_err(|e| AppError::Config(e.to_string()))?;
            let returns = simulate(&params, days, config.seed, VarianceSource::Returns);
            let prices = synthetic_prices(&returns, start, 1000.0).map_err(AppError::stage("simulate", Stage::Load))?;
            io::write_prices(&file, &prices)?;
            println!("wrote {} prices to {}", prices.len(), file.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
