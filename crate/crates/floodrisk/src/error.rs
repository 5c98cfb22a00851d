use thiserror::Error;

/// One malformed row in a CSV input, by 1-based line number.
#[derive(Debug, Clone)]
pub struct RowError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for RowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("{} malformed row(s): {}", .0.len(), .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Rows(Vec<RowError>),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("optimizer did not converge after {iterations} iterations (best value {best_value})")]
    NonConvergence { iterations: usize, best_value: f64 },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code convention: 1 for model/domain failures,
    /// 2 for IO, schema, and configuration failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Model(_) | Error::NonConvergence { .. } => 1,
            _ => 2,
        }
    }
}
