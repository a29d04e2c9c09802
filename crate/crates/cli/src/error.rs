use thiserror::Error;

/// Failures that stop a run before any check is evaluated.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config error at `{path}`: {message}")]
    Semantic { path: String, message: String },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("non-finite value in {table}.csv row {row}, column `{column}`")]
    NonFinite { table: String, row: usize, column: String },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn semantic(path: &str, message: &str) -> Self {
        CliError::Semantic { path: path.to_string(), message: message.to_string() }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }
}
