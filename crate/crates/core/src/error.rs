use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("zero-mode content where the mean must vanish ({0})")]
    ZeroMode(&'static str),

    #[error("field is not +helical: residual {residual:.3e} exceeds {tolerance:.1e}")]
    Decomposition { residual: f64, tolerance: f64 },

    #[error("numerical divergence after t = {last_good_time}")]
    Divergence { last_good_time: f64 },

    #[error("grid with {modes} modes exceeds the direct-evaluation limit of {limit}")]
    GridTooLarge { modes: usize, limit: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value while assembling term {term}")]
    Assembly { term: usize },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("scaling by {factor} overflows the grid at frequency {frequency:?}")]
    ScalingOverflow { factor: usize, frequency: [i64; 3] },

    #[error("insufficient data: {0}")]
    InsufficientData(&'static str),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("solver failure: {0}")]
    Solver(String),

    #[error(transparent)]
    Config(#[from] crate::config::ConfigErrors),

    #[error(transparent)]
    Snapshot(#[from] crate::snapshot::SnapshotError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
