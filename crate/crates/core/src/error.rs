use thiserror::Error;

use crate::observable::Character;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("generator `{name}`: decimal expansion disagrees with recipe `{recipe}`")]
    RecipeMismatch { name: String, recipe: String },

    #[error("product of two irrational scalars is not representable")]
    IrrationalProduct,

    #[error("limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("exponent polynomial is not integer-valued: {0}")]
    NotIntegerValued(String),

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("system `{label}` is not ergodic (invariant character {witness})")]
    NotErgodic { label: String, witness: Character },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}
