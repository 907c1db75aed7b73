//! Error type shared across the simulator.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("duplicate mode label `{0}`")]
    DuplicateLabel(String),

    #[error("cutoff for mode `{0}` must be at least 1")]
    ZeroCutoff(String),

    #[error("unknown mode label `{0}`")]
    UnknownLabel(String),

    #[error("register mismatch: {0}")]
    RegisterMismatch(String),

    #[error("partial trace needs a non-empty set of modes to keep")]
    EmptyKeep,

    #[error("squeezing parameter must satisfy |gamma| < 1, got {0}")]
    GammaOutOfRange(f64),

    #[error("operator is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("exponential series did not converge: {terms} terms, last term norm {last_term:.3e}")]
    SeriesNotConverged { terms: usize, last_term: f64 },

    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("degenerate normal modes: {0}")]
    DegenerateModes(String),

    #[error("step-halving check failed: dt={dt:.3e} and dt/2 disagree by {delta:.3e}")]
    StepSizeNotConverged { dt: f64, delta: f64 },

    #[error("cutoff infeasible: {0}")]
    CutoffInfeasible(String),

    #[error("invalid scenario config: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;
