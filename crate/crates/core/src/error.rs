use thiserror::Error;

use crate::matrix::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value lies outside the domain of a function (for example `u(0)`).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two assets coincide (`r_ij = 0`) where a positive distance is required.
    #[error("degenerate input: assets {i} and {j} collide (distance 0)")]
    Collision { i: usize, j: usize },

    /// Two comparands coincide, which makes the reference energy infinite.
    #[error("degenerate comparands: assets {i} and {j} form a doubleton (distance 0); rerun with dedupe to collapse duplicates")]
    Doubleton { i: usize, j: usize },

    #[error("at least two comparands required: got {n} assets, need at least {required}")]
    TooFewAssets { n: usize, required: usize },

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(Box<ValidationReport>),

    #[error("dimension mismatch in row {row}: expected {expected}, found {found}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("asset {index} has no tokens after tokenization")]
    EmptyText { index: usize },

    #[error("duplicate asset id {0:?}")]
    DuplicateId(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable, machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Collision { .. } => "collision",
            Error::Doubleton { .. } => "doubleton",
            Error::TooFewAssets { .. } => "too_few_assets",
            Error::InvalidMatrix(_) => "invalid_matrix",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EmptyText { .. } => "empty_text",
            Error::DuplicateId(_) => "duplicate_id",
            Error::UndefinedCorrelation(_) => "undefined_correlation",
            Error::Config(_) => "config",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
