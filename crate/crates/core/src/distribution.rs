//! Synthetic sensor/weight data.
//!
//! Values are normalized to full scale: samples lie in [0, 1], weights in
//! [-1, 1]. Converters see `|value| * vdd`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputDistribution {
    /// Samples uniform on [0, 1], weights uniform on [-1, 1].
    Uniform,
    /// Zero-mean normal with standard deviation `sigma` (full-scale units);
    /// samples take the magnitude, everything is clamped to full scale.
    ZeroPeakedGaussian { sigma: f64 },
    /// The same operands on every trial.
    Explicit { samples: Vec<f64>, weights: Vec<f64> },
}

impl Default for InputDistribution {
    fn default() -> Self {
        InputDistribution::ZeroPeakedGaussian { sigma: 0.15 }
    }
}

/// Operands for one MAC.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Operands {
    pub samples: Vec<f64>,
    pub weights: Vec<f64>,
}

impl InputDistribution {
    pub fn validate(&self, n_inputs: usize) -> Result<()> {
        match self {
            InputDistribution::Uniform => Ok(()),
            InputDistribution::ZeroPeakedGaussian { sigma } => {
                if *sigma > 0.0 && sigma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("sigma {sigma} must be positive")))
                }
            }
            InputDistribution::Explicit { samples, weights } => {
                if samples.len() != n_inputs || weights.len() != n_inputs {
                    return Err(Error::SizeMismatch(format!(
                        "explicit operands have {} samples and {} weights, expected {n_inputs}",
                        samples.len(),
                        weights.len()
                    )));
                }
                if samples.iter().chain(weights).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter("explicit operands must be finite".into()));
                }
                Ok(())
            }
        }
    }

    /// Draws `n` sample/weight pairs deterministically from `seed`.
    pub fn draw(&self, n: usize, seed: u64) -> Operands {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            InputDistribution::Uniform => {
                let unit = Uniform::new_inclusive(0.0, 1.0).expect("valid range");
                let signed = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
                let samples = (0..n).map(|_| unit.sample(&mut rng)).collect();
                let weights = (0..n).map(|_| signed.sample(&mut rng)).collect();
                Operands { samples, weights }
            }
            InputDistribution::ZeroPeakedGaussian { sigma } => {
                let normal = Normal::new(0.0, *sigma).expect("validated sigma");
                let samples = (0..n).map(|_| f64::abs(normal.sample(&mut rng)).min(1.0)).collect();
                let weights = (0..n).map(|_| normal.sample(&mut rng).clamp(-1.0, 1.0)).collect();
                Operands { samples, weights }
            }
            InputDistribution::Explicit { samples, weights } => Operands {
                samples: samples.clone(),
                weights: weights.clone(),
            },
        }
    }

    /// `P(|v| >= t)` for a converter input drawn from this distribution,
    /// `t` in full-scale units. Samples and weights have the same magnitude
    /// law except for `Explicit`, which pools both lists.
    pub fn prob_magnitude_at_least(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        match self {
            InputDistribution::Uniform => (1.0 - t).clamp(0.0, 1.0),
            InputDistribution::ZeroPeakedGaussian { sigma } => {
                if t > 1.0 {
                    0.0
                } else {
                    statrs::function::erf::erfc(t / (sigma * std::f64::consts::SQRT_2))
                }
            }
            InputDistribution::Explicit { samples, weights } => {
                let all: Vec<f64> = samples.iter().chain(weights).map(|v| v.abs().min(1.0)).collect();
                if all.is_empty() {
                    return 0.0;
                }
                all.iter().filter(|&&v| v >= t).count() as f64 / all.len() as f64
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            InputDistribution::Uniform => "uniform".into(),
            InputDistribution::ZeroPeakedGaussian { sigma } => format!("zero_peaked_gaussian(sigma={sigma})"),
            InputDistribution::Explicit { .. } => "explicit".into(),
        }
    }
}

/// Expected enabled sense amplifiers per chain-gated conversion of an
/// `m`-level ASC: SA `i` runs iff the input reaches `VREF[i-1] = i/(m+1)`.
pub fn expected_enabled_sas(m: usize, dist: &InputDistribution) -> f64 {
    (0..m)
        .map(|i| dist.prob_magnitude_at_least(i as f64 / (m + 1) as f64))
        .sum()
}

/// Fraction of SA evaluations saved by chain gating, `1 - E[enabled] / m`.
pub fn expected_gating_saving(m: usize, dist: &InputDistribution) -> f64 {
    1.0 - expected_enabled_sas(m, dist) / m as f64
}
