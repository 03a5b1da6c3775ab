use alloc::string::String;

use num_bigint::BigUint;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("slice [{a}, {b}] is out of range for a word of length {len}")]
    SliceOutOfRange { a: usize, b: usize, len: usize },

    #[error("factor length {k} exceeds word length {len}")]
    FactorTooLong { k: usize, len: usize },

    #[error("invalid letter {0:?}, expected '0' or '1'")]
    InvalidLetter(char),

    #[error("word of length {found} does not fit a set of length {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("image index {i} out of range for m = {m}")]
    ImageIndex { m: u32, i: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("generation {n} is below the minimum {min} for this operation")]
    GenerationTooSmall { n: usize, min: usize },

    #[error("predicted size {predicted} exceeds the budget of {budget} words")]
    BudgetExceeded { predicted: BigUint, budget: u64 },

    #[error("result would have about {digits} decimal digits, above the cap of {cap}")]
    DigitCapExceeded { digits: u64, cap: u64 },

    #[error("internal consistency: {numerator} is not divisible by {denominator}")]
    InexactDivision {
        numerator: BigUint,
        denominator: BigUint,
    },
}
