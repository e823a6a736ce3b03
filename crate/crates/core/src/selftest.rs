//! Built-in consistency checks, runnable from the CLI without a test harness.
//!
//! Each check is exhaustive over a small domain and compares two independent
//! computations of the same quantity.

use serde::{Deserialize, Serialize};

use crate::converters::asc::{asc_encode, expected_enabled_uniform, Gating, RefLadder, ThermometerCode};
use crate::converters::binary::bsc_encode_stream;
use crate::converters::lfsr::{maximal_taps, Lfsr};
use crate::energy::{accumulate, reduction_from_totals};
use crate::error::Result;
use crate::mac::{charge_oracle, count_products, decode_voltage, mac_evaluate, MacConfig, MacInputs, SignedStream};
use crate::pipeline::{profile, Variant};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, failures: Vec<String>, cases: u64) -> Self {
        let passed = failures.is_empty();
        let detail = if passed {
            format!("{cases} cases")
        } else {
            format!("{} of {cases} failed; first: {}", failures.len(), failures[0])
        };
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

pub fn run_all() -> Result<Vec<CheckResult>> {
    Ok(vec![
        lfsr_periods()?,
        bsc_full_period_counts()?,
        asc_gating()?,
        mac_exhaustive()?,
        profile_totals()?,
    ])
}

fn lfsr_periods() -> Result<CheckResult> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for w in 2..=16u32 {
        let taps = maximal_taps(w).expect("shipped");
        let lfsr = Lfsr::new(w, taps, 1)?;
        cases += 1;
        if lfsr.period() != Some((1u64 << w) - 1) {
            failures.push(format!("width {w}: period {:?}", lfsr.period()));
        }
    }
    Ok(CheckResult::new("lfsr_maximal_period", failures, cases))
}

/// Over one full LFSR period, an n-bit code's stream has exactly
/// `code * (2^W - 1) / (2^n - 1)` ones.
fn bsc_full_period_counts() -> Result<CheckResult> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for (w, n) in [(4u32, 4u32), (4, 2), (8, 4), (8, 8)] {
        let period = (1usize << w) - 1;
        for code in 0..(1u64 << n) {
            let mut lfsr = Lfsr::new(w, maximal_taps(w).unwrap(), 1)?;
            let s = bsc_encode_stream(code, n, &mut lfsr, period)?;
            let want = code as usize * period / ((1 << n) - 1);
            cases += 1;
            if s.count_ones() != want {
                failures.push(format!("W={w} n={n} code={code}: {} ones, want {want}", s.count_ones()));
            }
        }
    }
    Ok(CheckResult::new("bsc_full_period_count", failures, cases))
}

/// Gating never changes the code, and the enabled count is `min(k + 1, m)`
/// for a code of `k` ones; averaging over levels matches the closed form.
fn asc_gating() -> Result<CheckResult> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for m in 1..=16usize {
        let ladder = RefLadder::new(m, 1.0)?;
        let steps = 64 * (m + 1);
        let mut enabled_sum = 0usize;
        for i in 0..steps {
            let x = (i as f64 + 0.5) / steps as f64;
            let gated = asc_encode(x, &ladder, Gating::Chain);
            let plain = asc_encode(x, &ladder, Gating::Off);
            cases += 1;
            if gated.code != plain.code {
                failures.push(format!("m={m} x={x}: gating changed the code"));
            }
            let k = gated.code.count();
            if gated.activity.enabled_count() != (k + 1).min(m) {
                failures.push(format!(
                    "m={m} x={x}: {} enabled for {k} ones",
                    gated.activity.enabled_count()
                ));
            }
            enabled_sum += gated.activity.enabled_count();
        }
        let mean = enabled_sum as f64 / steps as f64;
        if (mean - expected_enabled_uniform(m)).abs() > 1e-9 {
            failures.push(format!(
                "m={m}: mean enabled {mean}, closed form {}",
                expected_enabled_uniform(m)
            ));
        }
    }
    Ok(CheckResult::new("asc_gating", failures, cases))
}

/// Every thermometer input/weight/sign combination for m <= 3, N <= 2:
/// decode recovers the net AND count and the charge model agrees with the
/// closed form.
fn mac_exhaustive() -> Result<CheckResult> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for m in 1..=3usize {
        for n in 1..=2usize {
            let cfg = MacConfig::new(m, n, 1.0)?;
            let levels = m + 1;
            let total = (levels * levels * 2).pow(n as u32);
            for mut idx in 0..total {
                let mut inputs = Vec::with_capacity(n);
                let mut weights = Vec::with_capacity(n);
                for _ in 0..n {
                    let a = idx % levels;
                    idx /= levels;
                    let w = idx % levels;
                    idx /= levels;
                    let positive = idx % 2 == 0;
                    idx /= 2;
                    inputs.push(ThermometerCode::from_count(a, m)?.to_bitstream());
                    weights.push(SignedStream::new(
                        ThermometerCode::from_count(w, m)?.to_bitstream(),
                        positive,
                    ));
                }
                let ops = MacInputs::new(inputs, weights)?;
                let counts = count_products(&ops);
                let out = mac_evaluate(&ops, &cfg)?;
                let oracle = charge_oracle(&ops, &cfg, None)?;
                cases += 1;
                if decode_voltage(out.voltage, &cfg)? != counts.net() {
                    failures.push(format!("m={m} N={n}: decode != net count {}", counts.net()));
                }
                if (oracle.shared - out.voltage).abs() > 1e-12 {
                    failures.push(format!(
                        "m={m} N={n}: charge model {} vs {}",
                        oracle.shared, out.voltage
                    ));
                }
                if (oracle.charge_before_share - oracle.charge_after_share).abs() > 1e-9 {
                    failures.push(format!("m={m} N={n}: charge not conserved"));
                }
            }
        }
    }
    Ok(CheckResult::new("mac_exhaustive", failures, cases))
}

fn profile_totals() -> Result<CheckResult> {
    let (conv_t, prop_t) = crate::energy::default_tables();
    let conv = accumulate(&profile::calibrated(Variant::Conventional), &conv_t)?.total_fj;
    let prop = accumulate(&profile::calibrated(Variant::Proposed), &prop_t)?.total_fj;
    let reduction = reduction_from_totals(conv, prop)?;
    let mut failures = Vec::new();
    if (conv - 5084.95).abs() > 1e-6 || (prop - 910.26).abs() > 1e-6 {
        failures.push(format!("totals {conv} / {prop} fJ"));
    }
    if format!("{reduction:.1}") != "82.1" {
        failures.push(format!("reduction {reduction}"));
    }
    Ok(CheckResult::new("calibrated_profile_totals", failures, 1))
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run_all().unwrap() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
