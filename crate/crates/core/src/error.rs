use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ring modulus {0} is not an odd prime")]
    NotPrime(u64),

    #[error("binomial D^{i} + D^{j} degenerates modulo {p}")]
    DegenerateBinomial { i: u32, j: u32, p: u32 },

    #[error("width mismatch: expected {expected} bits, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },

    #[error("invalid degree distribution parameters: {0}")]
    InvalidDistribution(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no prime split exists for word length {0}")]
    NoSplit(u32),

    #[error("code symbol {ell} was already read")]
    DuplicateSymbol { ell: u64 },

    #[error("inconsistent code symbols: {0}")]
    Corruption(String),

    #[error("malformed stream: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
