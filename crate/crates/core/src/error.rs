use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants map onto stable process exit codes in
/// [`crate::experiments::ExitCode`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point handed to an evaluator lies outside its action domain.
    #[error("point outside {domain} domain: {reason}")]
    OutsideDomain { domain: &'static str, reason: String },

    /// A numeric parameter violates its precondition (non-positive step, t < s, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Entropy divergence or step evaluated against a reference point on the simplex boundary.
    #[error("singular reference point: component {index} is {value:e}")]
    SingularReference { index: usize, value: f64 },

    /// Inconsistent dimensions or values while building a game or schedule.
    #[error("construction error: {0}")]
    Construction(String),

    /// A graph that must be connected is not.
    #[error("graph is not connected: {0}")]
    Disconnected(String),

    /// Randomized graph search ended without hitting the target.
    #[error("no graph within tolerance of lambda2 = {target}; closest found {closest}")]
    GraphNotFound { target: f64, closest: f64 },

    /// The requested operation needs an oracle the game class does not provide.
    #[error("capability error: {0}")]
    Capability(String),

    /// Inner minimization finished above its residual tolerance.
    #[error("minimization oracle failed: residual {residual:e} > tolerance {tol:e}")]
    OracleFailure { residual: f64, tol: f64 },

    /// The centralized NE solver could not certify the requested gap.
    #[error("equilibrium certificate failed: best gap {best_gap:e} > tolerance {tol:e}")]
    CertificateFailure { best_gap: f64, tol: f64 },

    /// An invariant that the algorithms guarantee was broken at runtime.
    #[error("internal assertion failed: {0}")]
    Internal(String),

    /// Configuration could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
