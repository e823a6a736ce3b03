//! Machine-readable outputs and the human summary.
//!
//! CSV columns and JSON keys are a public contract (see README). Floats are
//! written in Rust's shortest round-trip form so re-parsing reproduces the
//! exact values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::SCHEMA_VERSION;
use crate::energy::{EnergyReport, Event, Metrics};
use crate::error::{Error, Result};
use crate::pipeline::{ActivityProfile, Comparison, ErrorStats, ExperimentResult};

pub const TRIALS_CSV_HEADER: &str = "trial,seed,decoded,oracle,error,ideal_dot,voltage_v,saturated";
pub const ENERGY_CSV_HEADER: &str = "pipeline,profile,category,count,unit_fj,energy_fj";

pub fn trials_csv(result: &ExperimentResult) -> String {
    let mut out = String::with_capacity(64 * (result.trials.len() + 1));
    out.push_str(TRIALS_CSV_HEADER);
    out.push('\n');
    for r in &result.trials {
        let voltage = r.voltage.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.trial,
            r.seed,
            r.decoded,
            r.oracle,
            r.error(),
            r.ideal_dot,
            voltage,
            r.saturated
        )
        .unwrap();
    }
    out
}

fn energy_rows(out: &mut String, pipeline: &str, profile: &str, report: &EnergyReport) {
    for (event, c) in &report.categories {
        writeln!(
            out,
            "{pipeline},{profile},{event},{},{},{}",
            c.count, c.unit_fj, c.energy_fj
        )
        .unwrap();
    }
    writeln!(out, "{pipeline},{profile},total,,,{}", report.total_fj).unwrap();
}

/// Per-output energy per category, for the configured profile and for the
/// simulated counts (`count` is the total over all trials for the latter).
pub fn energy_csv(cmp: &Comparison) -> String {
    let mut out = String::new();
    out.push_str(ENERGY_CSV_HEADER);
    out.push('\n');
    let profile = cmp.conventional.config.activity_profile;
    for r in [&cmp.conventional, &cmp.proposed] {
        let name = r.variant.name();
        if profile != ActivityProfile::Structural {
            energy_rows(&mut out, name, profile.name(), &r.energy);
        }
        energy_rows(&mut out, name, "structural", &r.structural_energy);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub units: String,
    /// Per-output energy by category (fJ) under the configured profile.
    pub energy_fj: BTreeMap<Event, f64>,
    pub total_fj: f64,
    pub power_uw: f64,
    pub metrics: Vec<Metrics>,
    pub structural_total_fj: f64,
    pub stats: ErrorStats,
    pub gating_saving: Option<f64>,
}

impl PipelineSummary {
    fn from_result(r: &ExperimentResult) -> Self {
        Self {
            units: r.units.clone(),
            energy_fj: r.energy.categories.iter().map(|(&e, c)| (e, c.energy_fj)).collect(),
            total_fj: r.energy.total_fj,
            power_uw: r.energy.power_uw,
            metrics: r.energy.metrics.clone(),
            structural_total_fj: r.structural_energy.total_fj,
            stats: r.stats.clone(),
            gating_saving: r.measured_gating_saving(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub activity_profile: ActivityProfile,
    pub m: usize,
    pub n_inputs: usize,
    pub vdd: f64,
    pub binary_bits: u32,
    pub stream_length: usize,
    pub output_rate_hz: f64,
    pub distribution: String,
    pub flip_probability: f64,
    pub trials: u64,
    pub seed: u64,
    pub conventional: PipelineSummary,
    pub proposed: PipelineSummary,
    pub reduction_percent: f64,
    pub structural_reduction_percent: f64,
}

impl Summary {
    pub fn from_comparison(cmp: &Comparison) -> Self {
        let c = &cmp.proposed.config;
        Self {
            schema_version: SCHEMA_VERSION,
            activity_profile: c.activity_profile,
            m: c.mac.m,
            n_inputs: c.mac.n_inputs,
            vdd: c.mac.vdd,
            binary_bits: c.binary_bits,
            stream_length: c.stream_length,
            output_rate_hz: c.output_rate_hz,
            distribution: c.distribution.label(),
            flip_probability: c.flip_probability,
            trials: c.trials,
            seed: c.seed,
            conventional: PipelineSummary::from_result(&cmp.conventional),
            proposed: PipelineSummary::from_result(&cmp.proposed),
            reduction_percent: cmp.reduction_percent,
            structural_reduction_percent: cmp.structural_reduction_percent,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("summary: {e}")))
    }

    /// Fixed-layout text table: module energies side by side, then the
    /// proposed structure's power/efficiency/FoM block and accuracy.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        writeln!(
            w,
            "energy per output ({} profile), m = {}, N = {}",
            self.activity_profile.name(),
            self.m,
            self.n_inputs
        )
        .unwrap();
        writeln!(w, "{:<24}{:>20}{:>20}", "module", "conventional (fJ)", "proposed (fJ)").unwrap();
        for event in Event::ALL {
            let c = self.conventional.energy_fj.get(&event);
            let p = self.proposed.energy_fj.get(&event);
            if c.is_none() && p.is_none() {
                continue;
            }
            let cell = |v: Option<&f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
            writeln!(w, "{:<24}{:>20}{:>20}", event.name(), cell(c), cell(p)).unwrap();
        }
        writeln!(
            w,
            "{:<24}{:>20.2}{:>20.2}",
            "total", self.conventional.total_fj, self.proposed.total_fj
        )
        .unwrap();
        writeln!(w, "reduction: {:.1}%", self.reduction_percent).unwrap();
        writeln!(
            w,
            "reduction (simulated counts): {:.1}%  [{:.2} fJ vs {:.2} fJ per output]",
            self.structural_reduction_percent, self.conventional.structural_total_fj, self.proposed.structural_total_fj
        )
        .unwrap();
        writeln!(w).unwrap();
        writeln!(
            w,
            "proposed structure @ {} MHz, VDD {:.2} V",
            self.output_rate_hz / 1e6,
            self.vdd
        )
        .unwrap();
        writeln!(w, "  energy:     {:.2} pJ/output", self.proposed.total_fj / 1e3).unwrap();
        writeln!(w, "  power:      {:.2} uW", self.proposed.power_uw).unwrap();
        for m in &self.proposed.metrics {
            writeln!(
                w,
                "  efficiency: {:.1} TOPS/W  ({}, {} ops/output)",
                m.efficiency_tops_per_w, m.convention.label, m.convention.ops_per_output
            )
            .unwrap();
        }
        for m in &self.proposed.metrics {
            writeln!(
                w,
                "  FoM:        {:.4} fJ/step  ({}, {} steps x {} ops)",
                m.fom_fj_per_step, m.convention.label, m.convention.fom_steps, m.convention.fom_ops
            )
            .unwrap();
        }
        if let Some(s) = self.proposed.gating_saving {
            writeln!(w, "  ASC gating saving (measured): {:.1}%", 100.0 * s).unwrap();
        }
        writeln!(w).unwrap();
        writeln!(
            w,
            "accuracy over {} trials ({}, seed {})",
            self.trials, self.distribution, self.seed
        )
        .unwrap();
        for (name, p) in [("conventional", &self.conventional), ("proposed", &self.proposed)] {
            writeln!(
                w,
                "  {:<13} rmse {:.6}  max|err| {:.6}  mean err {:.6}  [{}]",
                name, p.stats.rmse, p.stats.max_abs_error, p.stats.mean_error, p.units
            )
            .unwrap();
        }
        out
    }
}
