use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("residue field of size {p}^{m} exceeds the enumeration bound {bound}")]
    FieldTooLarge { p: u64, m: usize, bound: u64 },

    #[error("elements belong to different Witt contexts")]
    ContextMismatch,

    #[error("polygon heights differ: {0} vs {1}")]
    HeightMismatch(u32, u32),

    #[error("size bound exceeded: g = {g} > {bound}")]
    SizeBound { g: u32, bound: u32 },

    #[error("lower hull does not run from (0,0) to ({width},{height})")]
    BadEndpoints { width: u32, height: u32 },

    #[error("precision insufficient: {0}")]
    PrecisionInsufficient(String),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("invalid base change: {0}")]
    InvalidBaseChange(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("no solution in any residue field up to the extension cap; tried m = {ladder:?}")]
    FieldTooSmall { ladder: Vec<usize> },

    #[error(
        "main-part entry a[{i},{j}] is neither a unit nor zero; use the linearized slope oracle instead"
    )]
    ChValidity { i: usize, j: usize },

    #[error("polygon is not admissible: {0}")]
    NotAdmissible(String),

    #[error("chain is not strictly decreasing at position {0}")]
    ChainNotDecreasing(usize),

    #[error("missing assignment for {0}")]
    MissingAssignment(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
