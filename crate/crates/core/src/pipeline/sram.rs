use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative SRAM size of a stochastic store versus a binary store at `n`
/// bits of precision: a word needs `2^n - 1` cells instead of `n`.
pub fn sram_size_factor(n: u32) -> Result<Ratio<u64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("precision must be >= 1".into()));
    }
    if n > 63 {
        return Err(Error::InvalidParameter(format!("precision {n} too large")));
    }
    Ok(Ratio::new((1u64 << n) - 1, n as u64))
}

/// Word array used for access counting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SramModel {
    pub word_bits: u64,
    pub words: u64,
    /// Size relative to a binary array holding the same words.
    pub sizing_factor: Ratio<u64>,
}

impl SramModel {
    pub fn binary(bits: u32, words: u64) -> Self {
        Self {
            word_bits: bits as u64,
            words,
            sizing_factor: Ratio::from_integer(1),
        }
    }

    /// `stream_bits`-cell words standing in for `binary_bits`-bit words.
    pub fn stochastic(stream_bits: u64, binary_bits: u32, words: u64) -> Self {
        Self {
            word_bits: stream_bits,
            words,
            sizing_factor: Ratio::new(stream_bits, binary_bits.max(1) as u64),
        }
    }

    pub fn cells(&self) -> u64 {
        self.word_bits * self.words
    }
}
