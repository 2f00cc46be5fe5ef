//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of definition (v <= 0, rho outside
    /// the process interval, ...).
    #[error("domain violation: {0}")]
    Domain(String),

    /// A parameter combination makes the requested formula singular
    /// (alpha2 = 0, rho = -alpha3, non-hyperbolic point, ...).
    #[error("singular parameters: {0}")]
    Singular(String),

    /// An inversion has no unique answer (entropy not monotone in T on the
    /// search bracket).
    #[error("ambiguous inversion: {0}")]
    Ambiguous(String),

    /// An iterative method failed to converge.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// The process curve carries no thermodynamic model, so T, e, s are
    /// unavailable (pure p(rho) tables and closures).
    #[error("process curve has no thermodynamic model attached")]
    NoThermalModel,

    /// The caustic time has no interior extremum in the window, so there is
    /// no cusp to report.
    #[error("caustic is monotone on the window: no interior cusp")]
    MonotoneCaustic,

    /// Run-configuration problems (missing file, schema violation).
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn singular(msg: impl Into<String>) -> Self {
        Error::Singular(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
