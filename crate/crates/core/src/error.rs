use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid group parameters: {0}")]
    InvalidParams(String),
    #[error("group order {} exceeds the cap {cap}", order.map_or_else(|| "(overflow)".to_string(), |o| o.to_string()))]
    OrderCap { order: Option<u128>, cap: u128 },
    #[error("dimension mismatch: expected n={expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("generator {label} is not in the generating set of {group}")]
    UnavailableGenerator { label: String, group: String },
    #[error("rank {index} out of range for a group of order {order}")]
    RankOutOfRange { index: u64, order: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("cannot drop the last label of an empty word")]
    EmptyWord,
    #[error("flip target {target} is not on the path")]
    FlipTargetMissing { target: String },
    #[error("path is not self-avoiding: vertex {vertex} repeats at step {step}")]
    NotSelfAvoiding { step: usize, vertex: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JoinError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("the cycle has no edge ({from}, {from}{label})")]
    MissingEdge { from: String, label: String },
    #[error("labels {0} and {1} do not commute")]
    NotCommuting(String, String),
    #[error("cycles are not vertex-disjoint")]
    NotDisjoint,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Join(#[from] JoinError),
    #[error("{0} is not covered by this construction")]
    Unsupported(String),
    #[error("badness {badness} of the subgroup cycle with respect to {label} must be 0")]
    NonzeroBadness { label: String, badness: usize },
    #[error("{covered} of {total} cosets reachable: no admissible connecting edge remains")]
    Disconnected { covered: u64, total: u64 },
    #[error("constructed word failed verification: {0}")]
    VerificationFailed(String),
    #[error("{0}")]
    Invariant(String),
}

/// A cycle file that could not be read, with a 1-based location.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}
