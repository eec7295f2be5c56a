use thiserror::Error;

pub type Result<T, E = WalkError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precision loss: pruning would discard {discarded:e} of total probability")]
    Precision { discarded: f64 },

    #[error("invalid walk specification: {0}")]
    InvalidSpec(String),

    #[error("random field has no value at position {0}")]
    MissingField(String),

    #[error("impossible measurement outcome (probability {probability:e})")]
    ImpossibleOutcome { probability: f64 },

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("circuit compilation requires a cyclic boundary")]
    MustBeCyclic,

    #[error(
        "circuit verification failed: deviation {deviation:e} between output mode {row} and input mode {col}"
    )]
    Verification { deviation: f64, row: usize, col: usize },
}
