use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("universe mismatch: {left} vs {right} elements")]
    UniverseMismatch { left: usize, right: usize },

    #[error("universe must have between 1 and {cap} elements, got {got}")]
    UniverseSize { got: usize, cap: usize },

    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown element label `{0}`")]
    UnknownLabel(String),

    #[error("resource cap exceeded: {what} (limit {limit})")]
    CapExceeded { what: &'static str, limit: usize },

    #[error("invalid line set: {0}")]
    InvalidLineSet(String),

    #[error("empty set where a nonempty set is required")]
    EmptySet,

    #[error("operation needs an exact-tier (finite or periodic) set")]
    NotExactTier,

    #[error("set must be infinite")]
    NotInfinite,

    #[error("mixed set representations: {0}")]
    MixedRepresentations(&'static str),

    #[error("structure is not LS-regular: {0}")]
    NotLsRegular(String),

    #[error("not a cover: point {0} is uncovered")]
    NotACover(u64),

    #[error("unsupported pairing: {0}")]
    Unsupported(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("schema error: {0}")]
    Schema(String),
}
