use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input violated a domain invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("lemma {lemma:?} is claimed by both AOI {first:?} and AOI {second:?}")]
    AmbiguousLemma {
        lemma: String,
        first: String,
        second: String,
    },

    #[error("{0} requires non-empty input")]
    EmptyInput(&'static str),

    #[error("cannot split {speakers} speakers into {k} folds")]
    TooFewSpeakers { k: usize, speakers: usize },

    #[error("training set of fold {fold} contains only one class")]
    FoldMissingClass { fold: usize },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
