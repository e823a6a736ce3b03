//! Experiment config file (JSON).
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "pipeline": { "binary_bits": 4, "stream_length": 15, ... },
//!   "mac": { "m": 15, "n_inputs": 300, "vdd": 1.0 },
//!   "energy_tables": { "conventional": { ... }, "proposed": { ... } },
//!   "experiment": { "trials": 64, "seed": 1 }
//! }
//! ```
//!
//! Every section and field is optional and falls back to
//! [`ConfigFile::default`]; unknown fields are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::converters::asc::Gating;
use crate::distribution::InputDistribution;
use crate::energy::EnergyTable;
use crate::error::{Error, Result};
use crate::mac::MacConfig;
use crate::pipeline::config::{ActivityProfile, LfsrPoly, PipelineConfig, Variant};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub binary_bits: u32,
    pub stream_length: usize,
    pub output_rate_hz: f64,
    pub distribution: InputDistribution,
    pub flip_probability: f64,
    pub asc_gating: Gating,
    pub bsc_lfsr: LfsrPoly,
    pub select_lfsr: LfsrPoly,
    pub activity_profile: ActivityProfile,
}

impl Default for PipelineSection {
    fn default() -> Self {
        Self {
            binary_bits: 4,
            stream_length: 15,
            output_rate_hz: 10e6,
            distribution: InputDistribution::default(),
            flip_probability: 0.0,
            asc_gating: Gating::Chain,
            bsc_lfsr: LfsrPoly {
                width: 4,
                taps: vec![4, 3],
            },
            select_lfsr: LfsrPoly {
                width: 17,
                taps: vec![17, 14],
            },
            activity_profile: ActivityProfile::Calibrated,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyTables {
    pub conventional: EnergyTable,
    pub proposed: EnergyTable,
}

impl EnergyTables {
    /// Default tables with the per-SA energy split over `m` amplifiers.
    pub fn defaults_for(m: usize) -> Self {
        Self {
            conventional: EnergyTable::conventional_default(),
            proposed: EnergyTable::proposed_default(m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub trials: u64,
    pub seed: u64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self { trials: 64, seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub pipeline: PipelineSection,
    #[serde(default = "default_mac")]
    pub mac: MacConfig,
    /// Absent tables are filled from the defaults for `mac.m`.
    #[serde(default)]
    pub energy_tables: Option<EnergyTables>,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_mac() -> MacConfig {
    MacConfig {
        m: 15,
        n_inputs: 300,
        vdd: 1.0,
    }
}

impl Default for ConfigFile {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            pipeline: PipelineSection::default(),
            mac: default_mac(),
            energy_tables: Some(EnergyTables::defaults_for(15)),
            experiment: ExperimentSection::default(),
        }
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    /// Reads and parses a config. I/O failures are returned separately so
    /// callers can tell them apart from bad content.
    pub fn load(path: &Path) -> std::result::Result<Result<Self>, std::io::Error> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::parse(&text))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn tables(&self) -> EnergyTables {
        self.energy_tables
            .clone()
            .unwrap_or_else(|| EnergyTables::defaults_for(self.mac.m))
    }

    pub fn pipeline(&self, variant: Variant) -> Result<PipelineConfig> {
        let tables = self.tables();
        let p = &self.pipeline;
        let cfg = PipelineConfig {
            variant,
            mac: self.mac,
            binary_bits: p.binary_bits,
            stream_length: p.stream_length,
            output_rate_hz: p.output_rate_hz,
            distribution: p.distribution.clone(),
            flip_probability: p.flip_probability,
            asc_gating: p.asc_gating,
            bsc_lfsr: p.bsc_lfsr.clone(),
            select_lfsr: p.select_lfsr.clone(),
            activity_profile: p.activity_profile,
            energy_table: match variant {
                Variant::Conventional => tables.conventional,
                Variant::Proposed => tables.proposed,
            },
            trials: self.experiment.trials,
            seed: self.experiment.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `(conventional, proposed)`.
    pub fn pipelines(&self) -> Result<(PipelineConfig, PipelineConfig)> {
        Ok((self.pipeline(Variant::Conventional)?, self.pipeline(Variant::Proposed)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        let cfg = ConfigFile::parse("{}").unwrap();
        assert_eq!(cfg.pipelines().unwrap(), ConfigFile::default().pipelines().unwrap());
    }

    #[test]
    fn round_trip() {
        let cfg = ConfigFile::default();
        assert_eq!(ConfigFile::parse(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ConfigFile::parse(r#"{"pipeline": {"bogus": 1}}"#).is_err());
        assert!(ConfigFile::parse(r#"{"extra": {}}"#).is_err());
        assert!(ConfigFile::parse(r#"{"schema_version": 99}"#).is_err());
    }

    #[test]
    fn invalid_values_fail_validation() {
        let cfg = ConfigFile::parse(r#"{"pipeline": {"binary_bits": 3}}"#).unwrap();
        assert!(cfg.pipelines().is_err(), "3 does not divide the 4-bit LFSR");
        let cfg = ConfigFile::parse(r#"{"mac": {"m": 0, "n_inputs": 1, "vdd": 1.0}}"#).unwrap();
        assert!(cfg.pipelines().is_err());
    }

    #[test]
    fn tables_follow_m_when_absent() {
        let cfg = ConfigFile::parse(r#"{"mac": {"m": 3, "n_inputs": 2, "vdd": 1.0}}"#).unwrap();
        let (_, prop) = cfg.pipelines().unwrap();
        let sa = prop.energy_table.get(crate::energy::Event::SaFire).unwrap();
        assert!((sa - 16.2 / 3.0).abs() < 1e-12);
    }
}
