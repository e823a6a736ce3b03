//! Activity-based energy accounting.
//!
//! An [`ActivityLog`] counts hardware events; an [`EnergyTable`] gives each
//! event a unit energy in femtojoules. Their dot product is the energy of
//! the logged run. All energies are carried in fJ.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Countable hardware event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    /// One SRAM bit-cell read or write.
    SramCellAccess,
    AdcConvert,
    /// LFSR + comparator conversion of one word into a stream.
    BscConvert,
    /// Counter conversion of one stream into a word.
    SbcConvert,
    /// One evaluation of the AND/MUX stochastic logic block.
    ScLogicEval,
    /// One fully-powered thermometer conversion.
    AscConvert,
    /// One sense-amplifier evaluation inside a gated ASC.
    SaFire,
    MixedSignalMacEval,
}

impl Event {
    pub const ALL: [Event; 8] = [
        Event::SramCellAccess,
        Event::AdcConvert,
        Event::BscConvert,
        Event::SbcConvert,
        Event::ScLogicEval,
        Event::AscConvert,
        Event::SaFire,
        Event::MixedSignalMacEval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Event::SramCellAccess => "sram_cell_access",
            Event::AdcConvert => "adc_convert",
            Event::BscConvert => "bsc_convert",
            Event::SbcConvert => "sbc_convert",
            Event::ScLogicEval => "sc_logic_eval",
            Event::AscConvert => "asc_convert",
            Event::SaFire => "sa_fire",
            Event::MixedSignalMacEval => "mixed_signal_mac_eval",
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Event {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Event::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownEvent(s.to_string()))
    }
}

/// Per-event unit energies (fJ). Events a structure does not have are
/// simply absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnergyTable {
    entries: BTreeMap<Event, f64>,
}

pub const SRAM_CELL_FJ: f64 = 28.00;
pub const ADC_4BIT_FJ: f64 = 2150.0;
pub const LFSR_COMPARATOR_FJ: f64 = 141.61;
pub const COUNTER_FJ: f64 = 185.54;
pub const SC_LOGIC_15BIT_FJ: f64 = 20.26;
pub const ASC_15BIT_FJ: f64 = 16.20;
pub const MIXED_SIGNAL_MAC_15BIT_FJ: f64 = 11.86;

impl EnergyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, event: Event, fj: f64) -> Self {
        self.entries.insert(event, fj);
        self
    }

    pub fn get(&self, event: Event) -> Option<f64> {
        self.entries.get(&event).copied()
    }

    pub fn set(&mut self, event: Event, fj: f64) {
        self.entries.insert(event, fj);
    }

    pub fn events(&self) -> impl Iterator<Item = Event> + '_ {
        self.entries.keys().copied()
    }

    pub fn validate(&self) -> Result<()> {
        for (e, &v) in &self.entries {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "energy for {e} must be a finite non-negative number, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Multiplies every entry by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|(&e, &v)| (e, v * k)).collect(),
        }
    }

    /// The binary-memory structure: ADC, SRAM, LFSR+comparator BSC, AND/MUX
    /// logic, counter SBC.
    pub fn conventional_default() -> Self {
        Self::new()
            .with(Event::SramCellAccess, SRAM_CELL_FJ)
            .with(Event::AdcConvert, ADC_4BIT_FJ)
            .with(Event::BscConvert, LFSR_COMPARATOR_FJ)
            .with(Event::SbcConvert, COUNTER_FJ)
            .with(Event::ScLogicEval, SC_LOGIC_15BIT_FJ)
    }

    /// The stochastic-memory structure: ASC, SRAM, mixed-signal MAC. The
    /// per-SA energy is the full-converter energy split evenly over `m` SAs.
    pub fn proposed_default(m: usize) -> Self {
        Self::new()
            .with(Event::SramCellAccess, SRAM_CELL_FJ)
            .with(Event::AscConvert, ASC_15BIT_FJ)
            .with(Event::SaFire, ASC_15BIT_FJ / m.max(1) as f64)
            .with(Event::MixedSignalMacEval, MIXED_SIGNAL_MAC_15BIT_FJ)
    }
}

/// `(conventional, proposed)` tables for the 15-bit configuration.
pub fn default_tables() -> (EnergyTable, EnergyTable) {
    (EnergyTable::conventional_default(), EnergyTable::proposed_default(15))
}

/// Event counters for one run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityLog {
    pub counts: BTreeMap<Event, u64>,
    /// Sense amplifiers powered / gated off across all ASC conversions.
    pub sa_enabled: u64,
    pub sa_disabled: u64,
}

impl ActivityLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (Event, u64)>) -> Self {
        let mut log = Self::new();
        for (e, n) in counts {
            log.record(e, n);
        }
        log
    }

    pub fn record(&mut self, event: Event, n: u64) {
        *self.counts.entry(event).or_insert(0) += n;
    }

    pub fn count(&self, event: Event) -> u64 {
        self.counts.get(&event).copied().unwrap_or(0)
    }

    pub fn events(&self) -> impl Iterator<Item = Event> + '_ {
        self.counts.keys().copied()
    }

    pub fn merge(&mut self, other: &ActivityLog) {
        for (&e, &n) in &other.counts {
            self.record(e, n);
        }
        self.sa_enabled += other.sa_enabled;
        self.sa_disabled += other.sa_disabled;
    }

    pub fn merged(mut self, other: &ActivityLog) -> Self {
        self.merge(other);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryEnergy {
    pub count: u64,
    pub unit_fj: f64,
    pub energy_fj: f64,
}

/// Per-event energies of a log under a table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub categories: BTreeMap<Event, CategoryEnergy>,
    pub total_fj: f64,
}

/// Dot product of counts and unit energies. Every logged event must have a
/// table entry.
pub fn accumulate(log: &ActivityLog, table: &EnergyTable) -> Result<EnergyBreakdown> {
    let mut categories = BTreeMap::new();
    let mut total_fj = 0.0;
    for (&event, &count) in &log.counts {
        let unit_fj = table.get(event).ok_or_else(|| Error::UnknownEvent(event.to_string()))?;
        let energy_fj = count as f64 * unit_fj;
        total_fj += energy_fj;
        categories.insert(
            event,
            CategoryEnergy {
                count,
                unit_fj,
                energy_fj,
            },
        );
    }
    Ok(EnergyBreakdown { categories, total_fj })
}

/// Operations per joule, numerically equal to operations per second per watt.
pub fn efficiency(ops_per_output: u64, energy_per_output_j: f64) -> Result<f64> {
    if ops_per_output == 0 {
        return Err(Error::InvalidParameter("ops per output must be positive".into()));
    }
    if energy_per_output_j <= 0.0 {
        return Err(Error::ZeroDivisor("energy per output"));
    }
    Ok(ops_per_output as f64 / energy_per_output_j)
}

/// Energy per output quantization step per elementary operation (J/step).
pub fn fom(energy_per_output_j: f64, steps: u64, ops: u64) -> Result<f64> {
    if steps == 0 || ops == 0 {
        return Err(Error::ZeroDivisor("FoM steps x ops"));
    }
    Ok(energy_per_output_j / (steps as f64 * ops as f64))
}

/// Operation- and step-counting convention for efficiency and FoM.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricConvention {
    pub label: String,
    pub ops_per_output: u64,
    pub fom_steps: u64,
    pub fom_ops: u64,
}

/// Back-solved op count behind the published 164.8 TOPS/W at 0.91 pJ/output.
pub const TABLE_OPS_PER_OUTPUT: u64 = 150;
/// Back-solved steps x ops product behind 0.38 fJ/step at 0.91 pJ/output.
pub const TABLE_FOM_NORMALIZATION: u64 = 2395;

impl MetricConvention {
    pub fn table_backsolved() -> Self {
        Self {
            label: "table_backsolved".into(),
            ops_per_output: TABLE_OPS_PER_OUTPUT,
            fom_steps: TABLE_FOM_NORMALIZATION,
            fom_ops: 1,
        }
    }

    /// `2N - 1` operations (N multiplies, N - 1 adds) and `2mN + 1`
    /// distinguishable output levels.
    pub fn structural(m: usize, n_inputs: usize) -> Self {
        let ops = 2 * n_inputs as u64 - 1;
        Self {
            label: "structural".into(),
            ops_per_output: ops,
            fom_steps: 2 * (m * n_inputs) as u64 + 1,
            fom_ops: ops,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub convention: MetricConvention,
    pub efficiency_tops_per_w: f64,
    pub fom_fj_per_step: f64,
}

/// Energy summary for one structure, normalized per MAC output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// Per-output category energies.
    pub categories: BTreeMap<Event, CategoryEnergy>,
    pub total_fj: f64,
    pub total_pj: f64,
    pub rate_hz: f64,
    pub power_uw: f64,
    pub metrics: Vec<Metrics>,
}

impl EnergyReport {
    /// Normalizes `breakdown` (covering `outputs` MAC outputs) to a single
    /// output and derives power and the efficiency metrics.
    pub fn new(
        breakdown: &EnergyBreakdown,
        outputs: u64,
        rate_hz: f64,
        conventions: &[MetricConvention],
    ) -> Result<Self> {
        if outputs == 0 {
            return Err(Error::ZeroDivisor("output count"));
        }
        if rate_hz.is_nan() || rate_hz <= 0.0 {
            return Err(Error::InvalidParameter(format!("rate {rate_hz} Hz must be positive")));
        }
        let n = outputs as f64;
        let categories: BTreeMap<Event, CategoryEnergy> = breakdown
            .categories
            .iter()
            .map(|(&e, c)| {
                (
                    e,
                    CategoryEnergy {
                        count: c.count,
                        unit_fj: c.unit_fj,
                        energy_fj: c.energy_fj / n,
                    },
                )
            })
            .collect();
        let total_fj = breakdown.total_fj / n;
        Self::from_total(categories, total_fj, rate_hz, conventions)
    }

    fn from_total(
        categories: BTreeMap<Event, CategoryEnergy>,
        total_fj: f64,
        rate_hz: f64,
        conventions: &[MetricConvention],
    ) -> Result<Self> {
        let energy_j = total_fj * 1e-15;
        let metrics = if total_fj > 0.0 {
            conventions
                .iter()
                .map(|c| {
                    Ok(Metrics {
                        convention: c.clone(),
                        efficiency_tops_per_w: efficiency(c.ops_per_output, energy_j)? / 1e12,
                        fom_fj_per_step: fom(energy_j, c.fom_steps, c.fom_ops)? * 1e15,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            categories,
            total_fj,
            total_pj: total_fj / 1e3,
            rate_hz,
            // fJ * Hz = 1e-15 W = 1e-9 uW
            power_uw: total_fj * rate_hz / 1e9,
            metrics,
        })
    }

    /// Report for a bare per-output energy, without a category breakdown.
    pub fn from_energy(total_fj: f64, rate_hz: f64, conventions: &[MetricConvention]) -> Result<Self> {
        Self::from_total(BTreeMap::new(), total_fj, rate_hz, conventions)
    }

    pub fn metric(&self, label: &str) -> Option<&Metrics> {
        self.metrics.iter().find(|m| m.convention.label == label)
    }
}

/// `100 * (1 - candidate / baseline)` on per-output totals.
pub fn reduction_percent(baseline: &EnergyReport, candidate: &EnergyReport) -> Result<f64> {
    reduction_from_totals(baseline.total_fj, candidate.total_fj)
}

pub fn reduction_from_totals(baseline_fj: f64, candidate_fj: f64) -> Result<f64> {
    if baseline_fj <= 0.0 {
        return Err(Error::ZeroDivisor("baseline energy"));
    }
    Ok(100.0 * (1.0 - candidate_fj / baseline_fj))
}
