//! End-to-end conventional and proposed memory + MAC systems.
//!
//! A run is a sequence of independent trials. Trial `t` gets the seed
//! `derive(cfg.seed, t)`; operands and every internal random choice are
//! derived from it, so trials can run in any order (they are evaluated in
//! parallel) and still produce identical results.

pub mod config;
mod conventional;
pub mod oracle;
pub mod profile;
mod proposed;
pub mod sram;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::Operands;
use crate::energy::{accumulate, reduction_from_totals, ActivityLog, EnergyReport, MetricConvention};
use crate::error::{Error, Result};
use crate::rng;

pub use config::{ActivityProfile, LfsrPoly, PipelineConfig, Variant};
pub use oracle::{exact_oracle, Quantizer};
pub use sram::{sram_size_factor, SramModel};

const KEY_OPERANDS: u64 = 0xA11C_E000;

pub(crate) struct TrialOutcome {
    pub decoded: f64,
    pub oracle: f64,
    pub voltage: Option<f64>,
    pub saturated: bool,
}

/// One trial's result. `decoded` and `oracle` are in the pipeline's own
/// units: signed AND-count (`n_p - n_n`) for the proposed path, full-scale
/// product value for the conventional one. `ideal_dot` is the unquantized
/// `sum(sample * weight)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub decoded: f64,
    pub oracle: f64,
    pub ideal_dot: f64,
    pub voltage: Option<f64>,
    pub saturated: bool,
}

impl TrialRecord {
    pub fn error(&self) -> f64 {
        self.decoded - self.oracle
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub trials: u64,
    pub mean_error: f64,
    pub max_abs_error: f64,
    pub rmse: f64,
    pub median_abs_error: f64,
}

impl ErrorStats {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let n = records.len();
        if n == 0 {
            return Self {
                trials: 0,
                mean_error: 0.0,
                max_abs_error: 0.0,
                rmse: 0.0,
                median_abs_error: 0.0,
            };
        }
        let errors: Vec<f64> = records.iter().map(TrialRecord::error).collect();
        let mean_error = errors.iter().sum::<f64>() / n as f64;
        let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / n as f64).sqrt();
        let mut abs: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let max_abs_error = abs[n - 1];
        let median_abs_error = if n % 2 == 1 {
            abs[n / 2]
        } else {
            0.5 * (abs[n / 2 - 1] + abs[n / 2])
        };
        Self {
            trials: n as u64,
            mean_error,
            max_abs_error,
            rmse,
            median_abs_error,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub variant: Variant,
    pub units: String,
    pub trials: Vec<TrialRecord>,
    pub stats: ErrorStats,
    /// Events counted by the simulation, summed over all trials.
    pub activity: ActivityLog,
    /// Per-output energy of the simulated counts.
    pub structural_energy: EnergyReport,
    /// Per-output energy under `config.activity_profile`.
    pub energy: EnergyReport,
    pub config: PipelineConfig,
}

impl ExperimentResult {
    /// Fraction of sense-amplifier evaluations avoided by gating.
    pub fn measured_gating_saving(&self) -> Option<f64> {
        let total = self.activity.sa_enabled + self.activity.sa_disabled;
        (total > 0).then(|| self.activity.sa_disabled as f64 / total as f64)
    }
}

/// Operands for each trial.
#[derive(Clone, Copy, Debug)]
pub enum InputSource<'a> {
    /// Fresh draw from `cfg.distribution` per trial.
    Distribution,
    /// The same operands for every trial.
    Fixed(&'a Operands),
}

pub fn metric_conventions(cfg: &PipelineConfig) -> Vec<MetricConvention> {
    vec![
        MetricConvention::table_backsolved(),
        MetricConvention::structural(cfg.mac.m, cfg.mac.n_inputs),
    ]
}

fn trial_operands(cfg: &PipelineConfig, source: InputSource<'_>, trial_seed: u64) -> Operands {
    match source {
        InputSource::Fixed(ops) => ops.clone(),
        InputSource::Distribution => cfg
            .distribution
            .draw(cfg.mac.n_inputs, rng::derive(trial_seed, KEY_OPERANDS)),
    }
}

pub fn run_pipeline(cfg: &PipelineConfig, source: InputSource<'_>) -> Result<ExperimentResult> {
    cfg.validate()?;
    if let InputSource::Fixed(ops) = source {
        check_operands(ops, cfg.mac.n_inputs)?;
    }
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = rng::derive(cfg.seed, t);
            let ops = trial_operands(cfg, source, seed);
            let (outcome, log) = match cfg.variant {
                Variant::Conventional => conventional::trial(&ops, cfg, seed)?,
                Variant::Proposed => proposed::trial(&ops, cfg, seed)?,
            };
            let ideal_dot = ops.samples.iter().zip(&ops.weights).map(|(s, w)| s * w).sum();
            Ok((
                TrialRecord {
                    trial: t,
                    seed,
                    decoded: outcome.decoded,
                    oracle: outcome.oracle,
                    ideal_dot,
                    voltage: outcome.voltage,
                    saturated: outcome.saturated,
                },
                log,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut activity = ActivityLog::new();
    let mut trials = Vec::with_capacity(outcomes.len());
    for (record, log) in outcomes {
        activity.merge(&log);
        trials.push(record);
    }
    let conventions = metric_conventions(cfg);
    let structural_energy = EnergyReport::new(
        &accumulate(&activity, &cfg.energy_table)?,
        cfg.trials,
        cfg.output_rate_hz,
        &conventions,
    )?;
    let energy = match profile::fixed(cfg.activity_profile, cfg.variant) {
        None => structural_energy.clone(),
        Some(log) => EnergyReport::new(
            &accumulate(&log, &cfg.energy_table)?,
            1,
            cfg.output_rate_hz,
            &conventions,
        )?,
    };
    Ok(ExperimentResult {
        variant: cfg.variant,
        units: match cfg.variant {
            Variant::Conventional => "full_scale_value".into(),
            Variant::Proposed => "and_count".into(),
        },
        stats: ErrorStats::from_records(&trials),
        trials,
        activity,
        structural_energy,
        energy,
        config: cfg.clone(),
    })
}

fn check_operands(ops: &Operands, n: usize) -> Result<()> {
    if ops.samples.len() != n || ops.weights.len() != n {
        return Err(Error::SizeMismatch(format!(
            "got {} samples and {} weights, expected N = {n}",
            ops.samples.len(),
            ops.weights.len()
        )));
    }
    if ops.samples.iter().chain(&ops.weights).any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("operands contain NaN".into()));
    }
    Ok(())
}

/// Runs the conventional path `cfg.trials` times on fixed operands.
pub fn conventional_pipeline(samples: &[f64], weights: &[f64], cfg: &PipelineConfig) -> Result<ExperimentResult> {
    let ops = Operands {
        samples: samples.to_vec(),
        weights: weights.to_vec(),
    };
    run_pipeline(
        &cfg.clone().with_variant(Variant::Conventional),
        InputSource::Fixed(&ops),
    )
}

/// Runs the proposed path `cfg.trials` times on fixed operands.
pub fn proposed_pipeline(samples: &[f64], weights: &[f64], cfg: &PipelineConfig) -> Result<ExperimentResult> {
    let ops = Operands {
        samples: samples.to_vec(),
        weights: weights.to_vec(),
    };
    run_pipeline(&cfg.clone().with_variant(Variant::Proposed), InputSource::Fixed(&ops))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub conventional: ExperimentResult,
    pub proposed: ExperimentResult,
    /// Under the configured activity profile.
    pub reduction_percent: f64,
    /// Under the simulated counts.
    pub structural_reduction_percent: f64,
}

/// Runs `baseline` and `candidate` on identical per-trial operands.
pub fn run_comparison(baseline: &PipelineConfig, candidate: &PipelineConfig) -> Result<Comparison> {
    let shared_ok = baseline.mac.n_inputs == candidate.mac.n_inputs
        && baseline.output_rate_hz == candidate.output_rate_hz
        && baseline.distribution == candidate.distribution
        && baseline.seed == candidate.seed
        && baseline.trials == candidate.trials
        && baseline.flip_probability == candidate.flip_probability
        && baseline.activity_profile == candidate.activity_profile;
    if !shared_ok {
        return Err(Error::Config(
            "compared configs must share N, rate, distribution, flip probability, trials, seed and activity profile"
                .into(),
        ));
    }
    let conventional = run_pipeline(baseline, InputSource::Distribution)?;
    let proposed = run_pipeline(candidate, InputSource::Distribution)?;
    let reduction_percent = reduction_from_totals(conventional.energy.total_fj, proposed.energy.total_fj)?;
    let structural_reduction_percent = reduction_from_totals(
        conventional.structural_energy.total_fj,
        proposed.structural_energy.total_fj,
    )?;
    Ok(Comparison {
        conventional,
        proposed,
        reduction_percent,
        structural_reduction_percent,
    })
}
