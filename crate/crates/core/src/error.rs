//! Error type shared across the pipeline.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("column '{0}' has no non-missing cells to impute from")]
    UnimputableColumn(String),

    #[error("impute plan does not cover column '{0}'")]
    PlanMismatch(String),

    #[error("type error: {0}")]
    Type(String),

    #[error("column '{0}' is constant (zero variance)")]
    ConstantColumn(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("labels are degenerate: {0}")]
    DegenerateLabels(String),

    #[error("invalid model spec: {0}")]
    Spec(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("perplexity calibration failed: {0}")]
    Calibration(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),
}
