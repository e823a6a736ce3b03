use serde::{Deserialize, Serialize};

use crate::converters::asc::Gating;
use crate::converters::lfsr::{maximal_taps, Lfsr};
use crate::distribution::InputDistribution;
use crate::energy::EnergyTable;
use crate::error::{Error, Result};
use crate::mac::MacConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// ADC -> binary SRAM -> BSC -> AND/MUX logic -> SBC.
    Conventional,
    /// ASC -> stochastic SRAM -> mixed-signal capacitor MAC.
    Proposed,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Conventional => "conventional",
            Variant::Proposed => "proposed",
        }
    }
}

/// Where the per-output event counts used for the headline energy come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityProfile {
    /// Counts measured by the simulation itself.
    Structural,
    /// One event per converter/logic block per output.
    Naive,
    /// Fitted counts; see [`crate::pipeline::profile::calibrated`].
    #[default]
    Calibrated,
}

impl ActivityProfile {
    pub fn name(self) -> &'static str {
        match self {
            ActivityProfile::Structural => "structural",
            ActivityProfile::Naive => "naive",
            ActivityProfile::Calibrated => "calibrated",
        }
    }
}

/// Feedback polynomial of an LFSR whose seed is drawn per trial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LfsrPoly {
    pub width: u32,
    pub taps: Vec<u32>,
}

impl LfsrPoly {
    pub fn shipped(width: u32) -> Result<Self> {
        let taps =
            maximal_taps(width).ok_or_else(|| Error::InvalidParameter(format!("no shipped taps for width {width}")))?;
        Ok(Self {
            width,
            taps: taps.to_vec(),
        })
    }

    pub fn reciprocal(&self) -> Self {
        let spec = crate::converters::lfsr::LfsrSpec {
            width: self.width,
            taps: self.taps.clone(),
            seed: 1,
        }
        .reciprocal();
        Self {
            width: spec.width,
            taps: spec.taps,
        }
    }

    pub fn build(&self, seed: u64) -> Result<Lfsr> {
        Lfsr::new(self.width, &self.taps, seed)
    }
}

/// Everything one pipeline run needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub variant: Variant,
    pub mac: MacConfig,
    /// ADC/BSC code width `n` of the conventional path.
    pub binary_bits: u32,
    /// Bitstream length `L` of the conventional SC logic.
    pub stream_length: usize,
    pub output_rate_hz: f64,
    pub distribution: InputDistribution,
    pub flip_probability: f64,
    pub asc_gating: Gating,
    pub bsc_lfsr: LfsrPoly,
    pub select_lfsr: LfsrPoly,
    pub activity_profile: ActivityProfile,
    pub energy_table: EnergyTable,
    pub trials: u64,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.mac.validate()?;
        if !(1..=16).contains(&self.binary_bits) {
            return Err(Error::InvalidParameter(format!(
                "binary_bits {} outside 1..=16",
                self.binary_bits
            )));
        }
        if self.stream_length == 0 {
            return Err(Error::InvalidParameter("stream_length must be positive".into()));
        }
        if !(self.output_rate_hz > 0.0 && self.output_rate_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "output rate {} Hz must be positive",
                self.output_rate_hz
            )));
        }
        if !(0.0..=1.0).contains(&self.flip_probability) {
            return Err(Error::InvalidParameter(format!(
                "flip probability {} outside [0, 1]",
                self.flip_probability
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be positive".into()));
        }
        self.distribution.validate(self.mac.n_inputs)?;
        self.energy_table.validate()?;
        // constructing with seed 1 validates width and taps
        self.bsc_lfsr.build(1)?;
        self.select_lfsr.build(1)?;
        if !self.bsc_lfsr.width.is_multiple_of(self.binary_bits) {
            return Err(Error::InvalidParameter(format!(
                "binary_bits {} must divide the BSC LFSR width {}",
                self.binary_bits, self.bsc_lfsr.width
            )));
        }
        let depth = self.mac.n_inputs.next_power_of_two().trailing_zeros();
        if self.select_lfsr.width < depth {
            return Err(Error::InvalidParameter(format!(
                "select LFSR width {} cannot drive a depth-{depth} MUX tree",
                self.select_lfsr.width
            )));
        }
        Ok(())
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }
}
