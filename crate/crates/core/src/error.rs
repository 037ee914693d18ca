use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {asymmetry:.3e}, tol = {tol:.3e})")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("Jacobi iteration did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bad cut {cut:?} for {parties} parties: must be a nonempty proper subset")]
    BadCut { cut: Vec<usize>, parties: usize },

    #[error("state is not genuinely entangled across cut {cut:?} (Schmidt rank 1)")]
    NotGenuinelyEntangled { cut: Vec<usize> },

    #[error("target Schmidt rank {target} exceeds source Schmidt rank {source_rank}; SLOCC cannot increase it")]
    RankIncrease { source_rank: usize, target: usize },

    #[error("input state is a product state; SPPT maps cannot create entanglement from it")]
    SeparableInput,

    #[error("rank hypothesis not met: rank {rank} < {required}")]
    HypothesisNotMet { rank: usize, required: usize },

    #[error("spanning vectors are linearly dependent")]
    DegenerateSpan,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("(A, B) do not define an SPPT map: {0}")]
    NotSppt(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
