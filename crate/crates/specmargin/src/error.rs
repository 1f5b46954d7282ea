use std::fmt;
use std::path::PathBuf;

/// Pipeline stage an error surfaced in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Load,
    Returns,
    Summary,
    Fit,
    Measures,
    Bootstrap,
    Backtest,
    Diagnostics,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Load => "load",
            Stage::Returns => "returns",
            Stage::Summary => "summary",
            Stage::Fit => "fit",
            Stage::Measures => "measures",
            Stage::Bootstrap => "bootstrap",
            Stage::Backtest => "backtest",
            Stage::Diagnostics => "diagnostics",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{contract}: {stage}: {source}")]
    Stage {
        contract: String,
        stage: Stage,
        #[source]
        source: specmargin_core::Error,
    },
}

impl AppError {
    pub fn stage(contract: &str, stage: Stage) -> impl FnOnce(specmargin_core::Error) -> AppError + '_ {
        move |source| AppError::Stage { contract: contract.to_string(), stage, source }
    }

    /// 1 for invalid configuration, 2 for anything that failed while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = AppError> = std::result::Result<T, E>;
