use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground set size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("invalid set partition: {0}")]
    InvalidPartition(String),

    #[error("partition {q} does not refine {p}")]
    NotRefinement { q: String, p: String },

    #[error("block {block:?} is not a union of blocks of {q}")]
    Straddle { q: String, block: Vec<usize> },

    #[error("kappa indices must be >= 1, got {0:?}")]
    NonPositiveIndex(Vec<u32>),

    #[error("partition has {len} blocks but at most d = {d} are allowed")]
    TooManyBlocks { len: usize, d: i64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pairing system is rank deficient (rank {rank} of {size}); matrix = {matrix:?}")]
    RankDeficient {
        rank: usize,
        size: usize,
        matrix: Vec<Vec<String>>,
    },

    #[error("marking count mismatch: dimension sequence needs {expected} markings, got {got}")]
    MarkingMismatch { expected: usize, got: usize },

    #[error("invalid Prüfer code: {0}")]
    InvalidPrufer(String),
}
