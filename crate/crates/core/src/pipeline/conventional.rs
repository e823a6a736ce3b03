//! ADC -> binary SRAM -> LFSR BSC -> AND gates -> MUX trees -> counter SBC.
//!
//! Signed weights use sign-magnitude: each product is steered into a
//! positive or a negative MUX tree (the other tree sees a zero stream in
//! that leaf), the two trees are counted separately and subtracted after
//! the SBCs.

use crate::converters::binary::{adc_quantize, bsc_encode_stream, sbc_decode};
use crate::converters::lfsr::LfsrSpec;
use crate::distribution::Operands;
use crate::energy::{ActivityLog, Event};
use crate::error::Result;
use crate::pipeline::config::PipelineConfig;
use crate::pipeline::oracle::{exact_oracle, Quantizer};
use crate::pipeline::sram::SramModel;
use crate::pipeline::TrialOutcome;
use crate::rng;
use crate::sc::{inject_bitflips, mux_tree_accumulate, sc_mul, Bitstream, SelectSource};

const KEY_SAMPLE_BSC: u64 = 0x1000_0000;
const KEY_WEIGHT_BSC: u64 = 0x2000_0000;
const KEY_FLIP: u64 = 0x3000_0000;
const KEY_SELECT_POS: u64 = 0x4000_0000;
const KEY_SELECT_NEG: u64 = 0x5000_0000;

pub(crate) fn trial(ops: &Operands, cfg: &PipelineConfig, seed: u64) -> Result<(TrialOutcome, ActivityLog)> {
    let n = cfg.mac.n_inputs;
    let bits = cfg.binary_bits;
    let len = cfg.stream_length;
    let mut log = ActivityLog::new();
    let mut saturated = false;

    let mut sample_codes = Vec::with_capacity(n);
    let mut weight_codes = Vec::with_capacity(n);
    for (&s, &w) in ops.samples.iter().zip(&ops.weights) {
        let a = adc_quantize(s, bits)?;
        let b = adc_quantize(w.abs(), bits)?;
        saturated |= a.saturated || b.saturated;
        sample_codes.push(a.code as u64);
        weight_codes.push(b.code as u64);
    }
    log.record(Event::AdcConvert, 2 * n as u64);

    // write + read of every stored bit, plus one output word written back
    let words = SramModel::binary(bits, 2 * n as u64);
    let sign_cells = n as u64;
    log.record(
        Event::SramCellAccess,
        2 * (words.cells() + sign_cells) + (bits as u64 + 1),
    );

    let sample_poly = &cfg.bsc_lfsr;
    let weight_poly = cfg.bsc_lfsr.reciprocal();
    let width = cfg.bsc_lfsr.width;
    let mut positive_leaves = Vec::with_capacity(n);
    let mut negative_leaves = Vec::with_capacity(n);
    let zero = Bitstream::zeros(len)?;
    for i in 0..n {
        let key = i as u64;
        let mut la = sample_poly.build(rng::nonzero_bits(seed, KEY_SAMPLE_BSC + key, width))?;
        let mut lb = weight_poly.build(rng::nonzero_bits(seed, KEY_WEIGHT_BSC + key, width))?;
        let a = bsc_encode_stream(sample_codes[i], bits, &mut la, len)?;
        let b = bsc_encode_stream(weight_codes[i], bits, &mut lb, len)?;
        let mut product = sc_mul(&a, &b)?;
        if cfg.flip_probability > 0.0 {
            product = inject_bitflips(&product, cfg.flip_probability, rng::derive(seed, KEY_FLIP + key))?;
        }
        if ops.weights[i] < 0.0 {
            positive_leaves.push(zero.clone());
            negative_leaves.push(product);
        } else {
            positive_leaves.push(product);
            negative_leaves.push(zero.clone());
        }
    }
    log.record(Event::BscConvert, 2 * n as u64);
    log.record(Event::ScLogicEval, 1);

    let select = |key: u64| -> SelectSource {
        let w = cfg.select_lfsr.width;
        SelectSource::Lfsr(LfsrSpec {
            width: w,
            taps: cfg.select_lfsr.taps.clone(),
            seed: rng::nonzero_bits(seed, key, w),
        })
    };
    let pos = mux_tree_accumulate(&positive_leaves, &select(KEY_SELECT_POS))?;
    let neg = mux_tree_accumulate(&negative_leaves, &select(KEY_SELECT_NEG))?;
    let ones_pos = sbc_decode(&pos.stream) as f64;
    let ones_neg = sbc_decode(&neg.stream) as f64;
    log.record(Event::SbcConvert, 2);

    let decoded = pos.scale() as f64 * (ones_pos - ones_neg) / len as f64;
    let oracle = exact_oracle(&ops.samples, &ops.weights, Quantizer::Binary { bits })?;
    Ok((
        TrialOutcome {
            decoded,
            oracle: ratio_to_f64(oracle),
            voltage: None,
            saturated,
        },
        log,
    ))
}

fn ratio_to_f64(r: num_rational::Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
