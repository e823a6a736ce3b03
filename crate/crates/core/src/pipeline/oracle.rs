//! Exact integer/rational reference values for the two pipelines.
//!
//! These compute quantized codes with closed-form floor expressions rather
//! than by running the converters, so they stay independent of the
//! simulated signal path.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quantizer {
    /// `m`-level thermometer code: `count = floor(|x| (m + 1))` clamped to `m`.
    Thermometer { m: usize },
    /// `bits`-bit binary code: `floor(|x| 2^bits)` clamped to `2^bits - 1`.
    Binary { bits: u32 },
}

impl Quantizer {
    pub fn level(&self, x: f64) -> u64 {
        let x = if x.is_nan() { 0.0 } else { x.abs().min(1.0) };
        match *self {
            Quantizer::Thermometer { m } => ((x * (m + 1) as f64).floor() as u64).min(m as u64),
            Quantizer::Binary { bits } => {
                let full = (1u64 << bits) - 1;
                ((x * (1u64 << bits) as f64).floor() as u64).min(full)
            }
        }
    }
}

/// Signed dot product of quantized operands under the pipeline's product
/// rule.
///
/// Thermometer codes AND to the shorter run of leading ones, so each pair
/// contributes `min(count_a, count_b)` and the result is an integer count
/// (`n_p - n_n`). Binary codes are turned into independent LFSR streams, so
/// each pair contributes the expected product `qa * qb / (2^n - 1)^2` in
/// full-scale value units.
pub fn exact_oracle(samples: &[f64], weights: &[f64], quantizer: Quantizer) -> Result<Ratio<i64>> {
    if samples.len() != weights.len() {
        return Err(Error::SizeMismatch(format!(
            "{} samples but {} weights",
            samples.len(),
            weights.len()
        )));
    }
    let mut acc = Ratio::from_integer(0i64);
    for (&s, &w) in samples.iter().zip(weights) {
        let sign = if w < 0.0 { -1 } else { 1 };
        let a = quantizer.level(s) as i64;
        let b = quantizer.level(w) as i64;
        let term = match quantizer {
            Quantizer::Thermometer { .. } => Ratio::from_integer(a.min(b)),
            Quantizer::Binary { bits } => {
                let full = (1i64 << bits) - 1;
                Ratio::new(a * b, full * full)
            }
        };
        acc += term * sign;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermometer_and_is_min() {
        let q = Quantizer::Thermometer { m: 3 };
        // counts 2 and 1
        let v = exact_oracle(&[0.55], &[0.3], q).unwrap();
        assert_eq!(v, Ratio::from_integer(1));
        assert_eq!(exact_oracle(&[0.0], &[0.9], q).unwrap(), Ratio::from_integer(0));
        assert_eq!(exact_oracle(&[1.0], &[-1.0], q).unwrap(), Ratio::from_integer(-3));
    }

    #[test]
    fn binary_expected_product() {
        let q = Quantizer::Binary { bits: 4 };
        // codes 8 and 15
        let v = exact_oracle(&[0.5], &[-1.0], q).unwrap();
        assert_eq!(v, Ratio::new(-8, 15));
    }

    #[test]
    fn levels_clamp() {
        assert_eq!(Quantizer::Thermometer { m: 3 }.level(1.0), 3);
        assert_eq!(Quantizer::Binary { bits: 4 }.level(1.0), 15);
        assert_eq!(Quantizer::Binary { bits: 4 }.level(-0.5), 8);
    }

    #[test]
    fn length_mismatch() {
        assert!(exact_oracle(&[0.1], &[], Quantizer::Binary { bits: 2 }).is_err());
    }
}
