use std::path::PathBuf;

use thiserror::Error;

/// A single rejected CSV row, identified by its 1-based data row number.
#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    pub row: usize,
    pub reason: String,
}

impl std::fmt::Display for RowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "row {}: {}", self.row, self.reason)
    }
}

fn join_rows(rows: &[RowError]) -> String {
    rows.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV {path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("missing column `{column}` in {path}")]
    MissingColumn { path: PathBuf, column: String },
    #[error("invalid rows in {path}: {}", join_rows(.rows))]
    InvalidRows { path: PathBuf, rows: Vec<RowError> },
    #[error("need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("returns have zero variance; normalized volatility is undefined")]
    ZeroVariance,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("gamma = {gamma} is below the usable floor {floor:.5}: Gamma(2/gamma) overflows")]
    GammaRange { gamma: f64, floor: f64 },
    #[error("recurrence series at q = {q} has fewer than two exceedances")]
    EmptyRecurrence { q: f64 },
    #[error("too few intervals: need {needed}, have {got}")]
    TooFewIntervals { needed: usize, got: usize },
    #[error("optimizer did not converge after {iterations} iterations (simplex spread {spread:e}, best value {best})")]
    NoConvergence {
        iterations: usize,
        spread: f64,
        best: f64,
    },
    #[error("root bracketing failed: {0}")]
    Bracket(String),
    #[error("report JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
