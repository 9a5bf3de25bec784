use thiserror::Error;

/// Errors raised by grid construction, solvers and file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate bounds on axis {axis}: min {min} is not below max {max}")]
    DegenerateBox { axis: usize, min: f64, max: f64 },

    #[error("axis {axis} has {count} voxels, at least 2 are required")]
    TooFewVoxels { axis: usize, count: usize },

    #[error("region does not fit inside the grid bounds: {0}")]
    RegionOutsideBounds(String),

    #[error("field lives on a different grid than the operator")]
    GridMismatch,

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("linear solve did not reach tolerance {tol:e}: residual {residual:e} after {iterations} iterations")]
    NotConverged { residual: f64, tol: f64, iterations: usize },

    #[error("singular linear system (zero pivot at column {0})")]
    Singular(usize),

    #[error("cutoff bound violated: min |psi_delta| = {min_psi:e} < 0.5 * delta = {half_delta:e}")]
    BoundViolation { min_psi: f64, half_delta: f64 },

    #[error("{what}: {count} exceeds the budget of {limit}")]
    BudgetExceeded { what: &'static str, count: usize, limit: usize },

    #[error("could not place particle {index} at distance >= {min_distance} from its neighbours")]
    InfeasibleSeparation { index: usize, min_distance: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
