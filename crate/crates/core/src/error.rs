use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid flag shape: {0}")]
    InvalidShape(String),

    #[error("multidegree has {got} entries, shape needs {expected}")]
    DegreeLength { expected: usize, got: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("block range ({lo}, {hi}] invalid for l = {l}")]
    BlockRange { lo: usize, hi: usize, l: usize },

    #[error("{0:?} is not a block-ascending permutation for this shape")]
    NotBlockAscending(Vec<usize>),

    #[error("variable sets differ: {left} vs {right}")]
    VariableMismatch { left: String, right: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("exponent vector has {got} entries, variable set has {expected}")]
    ExponentLength { expected: usize, got: usize },

    #[error("reciprocal of 1 - 1 is undefined")]
    ReciprocalOfOne,

    #[error("expansion of 1/(1 - {0}) does not terminate: no capped variable")]
    NonTerminating(String),

    #[error("coefficient of {0} lies outside the truncation")]
    OutOfTruncation(String),

    #[error("cannot substitute {0} = 1 into a series truncated in {0}")]
    InvalidSubstitution(String),

    #[error("polynomial division is not exact")]
    InexactDivision,

    #[error("divisor must be a nonzero polynomial in one variable with leading coefficient +-1")]
    BadDivisor,
}

pub type Result<T> = std::result::Result<T, Error>;
