use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of a special function or kernel.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid parameters or configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Design with coincident points or too few points.
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    /// No jitter on the escalation ladder produced a factorization.
    #[error(
        "ill-conditioned matrix: factorization of {size}x{size} matrix failed at leading minor {minor} \
         (jitter up to {max_jitter:e})"
    )]
    IllConditioned {
        size: usize,
        /// 1-based order of the smallest leading minor that was not positive.
        minor: usize,
        max_jitter: f64,
    },

    /// Caller violated an operation contract (mismatched lengths, missing points).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Rate study could not be completed.
    #[error("experiment error: {0}")]
    Experiment(String),

    /// Malformed input data (CSV parsing and the like).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short stable identifier, e.g. `"ill_conditioned"`.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Config(_) => "config",
            Error::DegenerateDesign(_) => "degenerate_design",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::Contract(_) => "contract",
            Error::Experiment(_) => "experiment",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
