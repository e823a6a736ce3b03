//! Shared fixtures for the criterion benches.

use scmem_core::config::ConfigFile;
use scmem_core::mac::{MacInputs, SignedStream};
use scmem_core::pipeline::{PipelineConfig, Variant};
use scmem_core::rng;
use scmem_core::Bitstream;

/// Bernoulli(p) stream of length `len`.
pub fn random_stream(len: usize, p: f64, seed: u64) -> Bitstream {
    Bitstream::from_fn(len, |i| rng::unit(seed, i as u64) < p).expect("len > 0")
}

/// Random MAC operands of shape (m, n).
pub fn mac_inputs(m: usize, n: usize, seed: u64) -> MacInputs {
    let inputs = (0..n)
        .map(|i| random_stream(m, 0.5, rng::derive(seed, i as u64)))
        .collect();
    let weights = (0..n)
        .map(|i| {
            let s = rng::derive(seed, (n + i) as u64);
            SignedStream::new(random_stream(m, 0.5, s), rng::unit(s, u64::MAX) < 0.5)
        })
        .collect();
    MacInputs::new(inputs, weights).expect("equal shapes")
}

/// Default configuration with `trials` trials.
pub fn pipeline(variant: Variant, trials: u64) -> PipelineConfig {
    let mut c = ConfigFile::default();
    c.experiment.trials = trials;
    c.pipeline(variant).expect("default config is valid")
}
