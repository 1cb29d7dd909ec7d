use std::io;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph is disconnected: node {0} is unreachable")]
    Disconnected(usize),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("non-finite value at position {0}")]
    Numeric(usize),

    #[error("empty input")]
    EmptyInput,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("need at least 2 networks, got {0}")]
    TooFewNetworks(usize),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{stage} failed for network {network:?}: {source}")]
    Network {
        network: String,
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Whether the error stems from bad input data rather than from the
    /// environment or a bug.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::Io(_) | Error::Config(_) => false,
            Error::File { source, .. } | Error::Network { source, .. } => source.is_data_error(),
            _ => true,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
