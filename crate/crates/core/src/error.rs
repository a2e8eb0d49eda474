use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by matrix construction, summation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent pair p={p}, q={q}: q must be 1 or p-1 and p >= 2")]
    InvalidExponents { p: u32, q: u32 },

    #[error("mode table too short: need index {needed}, table holds 0..={available}")]
    ModeTableTooShort { needed: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no integer 2 <= p <= 64 with |cos(pi/p)| = |alpha/beta| = {ratio}")]
    ParameterDomain { ratio: f64 },

    #[error("sum did not converge: {what} has estimated error {est_error:e} > tolerance {tolerance:e}")]
    NonConvergence {
        what: String,
        est_error: f64,
        tolerance: f64,
    },

    #[error("F00 = 1 makes the momentum-representation transform singular")]
    SingularTransform,

    #[error("imaginary residue {residue:e} in Neumann block ({r},{s}) exceeds {tolerance:e}")]
    ImaginaryResidue {
        r: usize,
        s: usize,
        residue: f64,
        tolerance: f64,
    },

    #[error("constraint system is rank deficient: null-space dimension {null_dim}")]
    RankDeficient { null_dim: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("{what} = {value:e} exceeds {tolerance:e}")]
    Invariant {
        what: String,
        value: f64,
        tolerance: f64,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
