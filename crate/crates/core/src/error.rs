use thiserror::Error;

/// Errors raised by graph construction, scenario validation, analysis and the checkers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid edge ({u}, {v}) for n = {n}")]
    InvalidEdge { u: usize, v: usize, n: usize },

    #[error("graph is not connected ({components} components)")]
    NotConnected { components: usize },

    #[error("node {node} has an empty or out-of-range vote")]
    InvalidVote { node: usize },

    #[error("K = {0} is not supported (1 <= K <= 16)")]
    UnsupportedK(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
