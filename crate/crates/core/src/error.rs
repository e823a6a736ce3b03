use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} out of range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("LFSR state must be nonzero")]
    ZeroLfsrState,

    #[error("not a valid bitstream character: {0:?}")]
    BadBitChar(char),

    #[error("no energy table entry for event `{0}`")]
    UnknownEvent(String),

    #[error("division by zero: {0}")]
    ZeroDivisor(&'static str),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
