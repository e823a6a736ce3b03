//! Bit-accurate simulation of stochastic-computing multiply-accumulate
//! engines and their memory systems.
//!
//! Two structures are modeled end to end:
//!
//! * **conventional**: ADC, binary SRAM, LFSR + comparator binary-to-stochastic
//!   conversion, AND/MUX stochastic logic, counter readout;
//! * **proposed**: thermometer-coded analog-to-stochastic conversion with
//!   sense-amplifier gating, stochastic SRAM, and a mixed-signal
//!   charge-sharing capacitor MAC.
//!
//! Both log hardware events into an [`energy::ActivityLog`] that is priced by
//! an [`energy::EnergyTable`].

pub mod config;
pub mod converters;
pub mod distribution;
pub mod energy;
pub mod error;
pub mod mac;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod sc;
pub mod selftest;

pub use config::ConfigFile;
pub use converters::{Lfsr, LfsrSpec, RefLadder, ThermometerCode};
pub use distribution::{InputDistribution, Operands};
pub use energy::{ActivityLog, EnergyReport, EnergyTable, Event};
pub use error::{Error, Result};
pub use mac::{MacConfig, MacInputs, ProductCounts, SignedStream};
pub use pipeline::{Comparison, ExperimentResult, PipelineConfig, Variant};
pub use sc::{Bitstream, SelectSource};
