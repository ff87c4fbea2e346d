use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (‖M − M†‖_F = {0:e})")]
    NotHermitian(f64),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not a density operator: {0}")]
    InvalidState(String),

    #[error("invalid party system: {0}")]
    InvalidSystem(String),

    #[error("unknown party `{0}`")]
    UnknownParty(String),

    #[error("invalid bipartite cut: {0}")]
    InvalidCut(String),

    #[error("partial trace would leave no parties")]
    NothingLeft,

    #[error("basis index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("not a permutation of the party labels: {0}")]
    BadPermutation(String),

    #[error("all parties must be qubits")]
    NotQubits,

    #[error("channels act on different systems: {0}")]
    SystemMismatch(String),

    #[error("bad mixing weights: {0}")]
    BadWeights(String),

    #[error("Choi matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("Choi matrix does not describe a trace-preserving map (reference marginal off by {0:e})")]
    NotTracePreserving(f64),

    #[error("state is not GHZ-diagonal (off-diagonal residual {0:e})")]
    NotGhzDiagonal(f64),

    #[error("groups overlap on party `{0}`")]
    OverlappingGroups(String),

    #[error("state does not have Schmidt rank 2 across the cut (rank {0})")]
    NotSchmidtRank2(usize),

    #[error("two-party state does not have Schmidt rank 2 (rank {0})")]
    NotRank2(usize),

    #[error("no distinguishing projector found for party `{0}`")]
    LocalizationFailed(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
