//! Domain-boundary converters.

pub mod asc;
pub mod binary;
pub mod lfsr;

pub use asc::{asc_encode, AscActivity, AscOutput, Gating, RefLadder, ThermometerCode};
pub use binary::{adc_quantize, bsc_encode, bsc_encode_stream, sbc_decode, AdcSample};
pub use lfsr::{Lfsr, LfsrSpec};
