//! Binary-domain converters: the behavioral ADC, the LFSR + comparator
//! binary-to-stochastic converter (BSC) and the counter-based
//! stochastic-to-binary converter (SBC).

use serde::{Deserialize, Serialize};

use crate::converters::lfsr::Lfsr;
use crate::error::{Error, Result};
use crate::sc::Bitstream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdcSample {
    pub code: u32,
    /// Input was outside [0, 1] and got clamped.
    pub saturated: bool,
}

/// `floor(x * 2^bits)` clamped to `2^bits - 1`.
pub fn adc_quantize(x: f64, bits: u32) -> Result<AdcSample> {
    if x.is_nan() {
        return Err(Error::InvalidParameter("ADC input is NaN".into()));
    }
    if !(1..=31).contains(&bits) {
        return Err(Error::InvalidParameter(format!("ADC resolution {bits} outside 1..=31")));
    }
    let full = (1u64 << bits) - 1;
    let saturated = !(0.0..=1.0).contains(&x);
    let clamped = x.clamp(0.0, 1.0);
    let code = ((clamped * (1u64 << bits) as f64).floor() as u64).min(full) as u32;
    Ok(AdcSample { code, saturated })
}

/// One full LFSR period of comparator output: bit `t` is 1 iff the LFSR
/// output at step `t` is `<= value`. Over a period the LFSR visits every
/// nonzero state once, so the stream carries exactly `value` ones.
pub fn bsc_encode(value: u64, lfsr: &mut Lfsr) -> Result<Bitstream> {
    let full = lfsr.max_period();
    if value > full {
        return Err(Error::OutOfRange {
            value: value as f64,
            min: 0.0,
            max: full as f64,
        });
    }
    Bitstream::from_fn(full as usize, |_| lfsr.step() <= value)
}

/// BSC for an `code_bits`-bit code driven by a wider LFSR, emitting `len` bits.
///
/// The comparator threshold is `code * (2^W - 1) / (2^n - 1)`, which is an
/// integer because `n` must divide the LFSR width `W`. Each bit is then one
/// with probability exactly `code / (2^n - 1)` over a uniformly random LFSR
/// phase. With `W == n` and `len == 2^n - 1` this is [`bsc_encode`].
pub fn bsc_encode_stream(code: u64, code_bits: u32, lfsr: &mut Lfsr, len: usize) -> Result<Bitstream> {
    if code_bits == 0 || !lfsr.width().is_multiple_of(code_bits) {
        return Err(Error::InvalidParameter(format!(
            "code width {code_bits} must divide LFSR width {}",
            lfsr.width()
        )));
    }
    let code_full = (1u64 << code_bits) - 1;
    if code > code_full {
        return Err(Error::OutOfRange {
            value: code as f64,
            min: 0.0,
            max: code_full as f64,
        });
    }
    let threshold = code * (lfsr.max_period() / code_full);
    Bitstream::from_fn(len, |_| lfsr.step() <= threshold)
}

/// Ones counter.
pub fn sbc_decode(b: &Bitstream) -> u64 {
    b.count_ones() as u64
}

/// Value change caused by flipping bit `bit` of a binary word: `2^bit`.
/// The most significant bit of an `n`-bit word weighs `2^(n-1)`.
pub fn binary_flip_delta(word: u64, bit: u32) -> u64 {
    let flipped = word ^ (1u64 << bit);
    flipped.abs_diff(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::converters::lfsr::LfsrSpec;

    fn lfsr4() -> Lfsr {
        Lfsr::from_spec(&LfsrSpec::default_for(4).unwrap()).unwrap()
    }

    #[test]
    fn adc_examples() {
        assert_eq!(adc_quantize(0.0, 4).unwrap().code, 0);
        assert_eq!(adc_quantize(1.0, 4).unwrap().code, 15);
        assert_eq!(adc_quantize(0.5, 4).unwrap().code, 8);
        let s = adc_quantize(1.7, 4).unwrap();
        assert_eq!((s.code, s.saturated), (15, true));
        let s = adc_quantize(-0.1, 4).unwrap();
        assert_eq!((s.code, s.saturated), (0, true));
        assert!(adc_quantize(f64::NAN, 4).is_err());
    }

    #[test]
    fn bsc_examples() {
        let zero = bsc_encode(0, &mut lfsr4()).unwrap();
        assert_eq!(zero, Bitstream::zeros(15).unwrap());
        let full = bsc_encode(15, &mut lfsr4()).unwrap();
        assert_eq!(full, Bitstream::ones(15).unwrap());
        let eight = bsc_encode(8, &mut lfsr4()).unwrap();
        assert_eq!(eight.count_ones(), 8);
        assert!(bsc_encode(16, &mut lfsr4()).is_err());
    }

    #[test]
    fn bsc_sbc_round_trip_exhaustive() {
        for k in 0..=15 {
            assert_eq!(sbc_decode(&bsc_encode(k, &mut lfsr4()).unwrap()), k);
        }
    }

    #[test]
    fn wide_lfsr_stream_is_exact_over_a_period() {
        let spec = LfsrSpec::default_for(8).unwrap();
        for code in 0..=15 {
            let mut l = Lfsr::from_spec(&spec).unwrap();
            let s = bsc_encode_stream(code, 4, &mut l, 255).unwrap();
            assert_eq!(s.count_ones() as u64, code * 17);
        }
        let mut l = Lfsr::from_spec(&spec).unwrap();
        assert!(bsc_encode_stream(1, 3, &mut l, 10).is_err());
    }

    #[test]
    fn sbc_counts() {
        assert_eq!(sbc_decode(&"01011100".parse().unwrap()), 4);
        assert_eq!(sbc_decode(&Bitstream::zeros(15).unwrap()), 0);
    }

    #[test]
    fn msb_flip_weight() {
        for n in 1..=16u32 {
            assert_eq!(binary_flip_delta(0, n - 1), 1 << (n - 1));
            assert_eq!(binary_flip_delta((1 << n) - 1, n - 1), 1 << (n - 1));
        }
    }
}
