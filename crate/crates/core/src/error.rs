use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("logged dataset exhausted after {consumed} tuples with {valid} of {wanted} valid steps")]
    Exhausted {
        consumed: usize,
        valid: usize,
        wanted: usize,
    },

    #[error("ingest error at row {row}, column {col}: {msg}")]
    Ingest { row: usize, col: String, msg: String },

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable tag used in the CLI's machine-parseable error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "DimensionError",
            Error::Numerical(_) => "NumericalError",
            Error::Exhausted { .. } => "ExhaustedError",
            Error::Ingest { .. } => "IngestError",
            Error::Invalid(_) => "InvalidError",
            Error::Config(_) => "ConfigError",
            Error::Io(_) => "IoError",
            Error::Csv(_) => "CsvError",
            Error::Json(_) => "JsonError",
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
