use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("bisection for period {q} did not converge: bracket [{lo:e}, {hi:e}], residual {residual:e}")]
    NonConvergence { q: u32, lo: f64, hi: f64, residual: f64 },

    #[error("degenerate orbit: {0}")]
    DegenerateOrbit(String),

    #[error("kappa table covers j <= {available}, but {required} harmonics are required")]
    KappaTooShort { required: usize, available: usize },

    #[error("period {q} exceeds the configured cap maxq = {maxq}")]
    PeriodCap { q: u32, maxq: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            expected,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
