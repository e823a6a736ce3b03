//! ASC -> stochastic SRAM -> mixed-signal capacitor MAC.

use crate::converters::asc::{asc_encode, Gating, RefLadder};
use crate::distribution::Operands;
use crate::energy::{ActivityLog, Event};
use crate::error::Result;
use crate::mac::{
    counts_from_products, decode_voltage, mac_evaluate, mac_from_counts, product_streams, MacInputs, SignedStream,
};
use crate::pipeline::config::PipelineConfig;
use crate::pipeline::oracle::{exact_oracle, Quantizer};
use crate::pipeline::sram::SramModel;
use crate::pipeline::TrialOutcome;
use crate::rng;
use crate::sc::inject_bitflips;

const KEY_FLIP: u64 = 0x6000_0000;

pub(crate) fn trial(ops: &Operands, cfg: &PipelineConfig, seed: u64) -> Result<(TrialOutcome, ActivityLog)> {
    let mac = &cfg.mac;
    let n = mac.n_inputs;
    let ladder = RefLadder::new(mac.m, mac.vdd)?;
    let mut log = ActivityLog::new();
    let mut saturated = false;

    let mut convert = |x: f64, log: &mut ActivityLog| {
        let out = asc_encode(x * mac.vdd, &ladder, cfg.asc_gating);
        saturated |= out.clamped;
        let enabled = out.activity.enabled_count() as u64;
        log.sa_enabled += enabled;
        log.sa_disabled += out.activity.disabled_count() as u64;
        match cfg.asc_gating {
            Gating::Chain => log.record(Event::SaFire, enabled),
            Gating::Off => log.record(Event::AscConvert, 1),
        }
        out.code.to_bitstream()
    };

    let mut inputs = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (&s, &w) in ops.samples.iter().zip(&ops.weights) {
        inputs.push(convert(s, &mut log));
        weights.push(SignedStream::new(convert(w.abs(), &mut log), w >= 0.0));
    }

    // write + read of every stored cell; the analog output is not stored
    let words = SramModel::stochastic(mac.m as u64, cfg.binary_bits, 2 * n as u64);
    log.record(Event::SramCellAccess, 2 * (words.cells() + n as u64));

    let operands = MacInputs::new(inputs, weights)?;
    let outcome = if cfg.flip_probability > 0.0 {
        let flipped = product_streams(&operands)
            .iter()
            .enumerate()
            .map(|(i, p)| inject_bitflips(p, cfg.flip_probability, rng::derive(seed, KEY_FLIP + i as u64)))
            .collect::<Result<Vec<_>>>()?;
        mac_from_counts(counts_from_products(&flipped, operands.weights()), mac)?
    } else {
        mac_evaluate(&operands, mac)?
    };
    log.record(Event::MixedSignalMacEval, 1);

    let decoded = decode_voltage(outcome.voltage, mac)? as f64;
    let oracle = exact_oracle(&ops.samples, &ops.weights, Quantizer::Thermometer { m: mac.m })?;
    Ok((
        TrialOutcome {
            decoded,
            oracle: *oracle.numer() as f64 / *oracle.denom() as f64,
            voltage: Some(outcome.voltage),
            saturated,
        },
        log,
    ))
}
