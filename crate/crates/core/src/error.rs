use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("kernel evaluated at the origin")]
    SingularInput,

    #[error("points {i} and {j} coincide")]
    DegeneratePair { i: usize, j: usize },

    #[error("direction undefined: z = ζ or z = -ζ")]
    DegenerateDirection,

    #[error("angle domain is empty")]
    EmptyDomain,

    #[error("{path}: line {line}: {message}")]
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

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    QuadratureNonConvergence { estimate: f64, error_bound: f64 },

    #[error("only {usable} usable scales (need at least 3)")]
    InsufficientScales { usable: usize },

    #[error("measure has atoms; bin it with a positive width first")]
    AtomicInput,

    #[error("frequency ({xi1}, {xi2}) lies outside the reliable band [{lo}, {hi}]")]
    FrequencyOutOfBand { xi1: f64, xi2: f64, lo: f64, hi: f64 },

    #[error("at θ = {theta}: {source}")]
    AtAngle {
        theta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("at pair ({i}, {k}): {source}")]
    AtPair {
        i: usize,
        k: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_angle(self, theta: f64) -> Self {
        Error::AtAngle {
            theta,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_pair(self, i: usize, k: usize) -> Self {
        Error::AtPair {
            i,
            k,
            source: Box::new(self),
        }
    }

    /// Strips `AtAngle`/`AtPair` context and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtAngle { source, .. } | Error::AtPair { source, .. } => source.root(),
            other => other,
        }
    }
}
