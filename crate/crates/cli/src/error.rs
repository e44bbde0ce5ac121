use std::fmt;
use std::path::PathBuf;

use orbit_spaces::OrbitError;
use thiserror::Error;

/// A rejected catalog row and the line it starts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn list(errors: &[RowError]) -> String {
    errors
        .iter()
        .map(|e| format!("  {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("i/o error: {0}")]
    Stream(#[from] std::io::Error),
    #[error("bad header: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("{} malformed record(s):\n{}", .0.len(), list(.0))]
    Malformed(Vec<RowError>),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown id {0:?}")]
    UnknownId(String),
    #[error("k must satisfy 1 <= k < {size}, got {k}")]
    InvalidK { k: usize, size: usize },
    #[error("record {id:?}: {source}")]
    Record {
        id: String,
        #[source]
        source: OrbitError,
    },
    #[error("pair ({a:?}, {b:?}): {source}")]
    Pair {
        a: String,
        b: String,
        #[source]
        source: OrbitError,
    },
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, CatalogError>;
