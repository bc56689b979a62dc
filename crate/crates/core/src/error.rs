use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {value}, error estimate {error:e}")]
    Quadrature { value: String, error: f64 },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("eigenproblem failed: {0}")]
    Eigen(String),

    #[error("rational fit reached degree {degree} with error {achieved:e} above tolerance {tol:e}")]
    FitExhausted { degree: usize, achieved: f64, tol: f64 },

    #[error("channel mismatch: {0}")]
    Channel(String),

    #[error("ADO space of size {size} exceeds cap {cap}")]
    AdoCap { size: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("degenerate energy gap between sites {0} and {1}")]
    DegenerateGap(usize, usize),

    #[error("unpaired eigenvalue {0} (matching distance {1:e})")]
    Unpaired(String, f64),

    #[error("ill-conditioned eigenbasis: {0}")]
    IllConditioned(String),

    #[error("no mode has overlap above {0:e}")]
    NoDominantMode(f64),

    #[error("expected exactly one zero eigenvalue, found {0}")]
    ZeroModeCount(usize),

    #[error("localization fit: {0}")]
    Localization(String),

    #[error("integrator: {0}")]
    Integrator(String),

    #[error("trajectory never reached threshold; final distance {0:e}")]
    NeverRelaxed(f64),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
