use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside domain of definition: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported representation: {0}")]
    Unsupported(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("approximation failed: {0}")]
    ApproximationFailure(String),

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("mask has {0} connected components (sizes {1:?}); analyze per component")]
    Topology(usize, Vec<usize>),

    #[error("eigensolver did not converge within {iterations} iterations (last residuals {last_residuals:?})")]
    Solver {
        iterations: usize,
        last_residuals: Vec<f64>,
    },

    #[error("singular evaluation at {0}")]
    Singularity(String),

    #[error("degenerate Jacobian (|det| < {min_det:e}) at sample {sample}")]
    DegenerateJacobian { sample: String, min_det: f64 },

    #[error("pullback coverage too low: {invalid} of {total} target cells map outside the source")]
    Coverage { invalid: usize, total: usize },

    #[error("unknown catalog name: {0}")]
    UnknownName(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
