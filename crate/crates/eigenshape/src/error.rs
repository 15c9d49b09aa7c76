use thiserror::Error;

/// Crate-wide error type.
///
/// `NonConvergence` and `VerificationFailed` are kept distinct because the
/// CLI maps them to different exit statuses (3 and 4).
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside a function's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A shape is too small for the requested cell size.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Mask too large for a dense decomposition.
    #[error("size error: {cells} active cells exceeds the dense cap of {cap}")]
    SizeExceeded { cells: usize, cap: usize },

    /// The constrained problem has no admissible function on this mask.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An iterative solver ran out of iterations.
    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        what: String,
        iterations: usize,
        residual: f64,
    },

    /// Some sweep rows failed to converge; details are in their status column.
    #[error("{failed} of {total} rows failed to converge (see the status column)")]
    RowsFailed { failed: usize, total: usize },

    /// Config file rejected.
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    /// Bad command-line usage detected outside the arg parser.
    #[error("usage error: {0}")]
    Usage(String),

    /// A requested verification did not hold.
    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("malformed mask file: {0}")]
    MaskFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit status for the CLI: 2 usage/config, 3 non-convergence,
    /// 4 failed verification, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Usage(_) | Error::Config { .. } => 2,
            Error::NonConvergence { .. } | Error::RowsFailed { .. } => 3,
            Error::VerificationFailed(_) => 4,
            _ => 1,
        }
    }
}
