use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// One diagnostic line per malformed flag or config entry.
    #[error("{}", .0.join("\n"))]
    Usage(Vec<String>),
    #[error(transparent)]
    Model(#[from] cavity_duo::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("column `{column}` has a non-finite value {value} in row {row}")]
    NonFinite { column: String, row: usize, value: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
