use std::collections::BTreeSet;

use scmem_core::config::ConfigFile;
use scmem_core::converters::binary::{adc_quantize, binary_flip_delta};
use scmem_core::distribution::Operands;
use scmem_core::pipeline::{
    conventional_pipeline, proposed_pipeline, run_comparison, run_pipeline, ActivityProfile, InputSource, LfsrPoly,
    PipelineConfig, Variant,
};
use scmem_core::{Event, InputDistribution};

fn config(m: usize, n: usize, trials: u64) -> ConfigFile {
    let mut c = ConfigFile::default();
    c.mac.m = m;
    c.mac.n_inputs = n;
    c.energy_tables = None;
    c.experiment.trials = trials;
    c
}

fn pipeline(c: &ConfigFile, v: Variant) -> PipelineConfig {
    c.pipeline(v).unwrap()
}

/// Thermometer-quantized level of x by direct comparison with the divider
/// references (independent of the converter code).
fn level(x: f64, m: usize) -> i64 {
    (1..=m).filter(|&i| x >= i as f64 / (m + 1) as f64).count() as i64
}

#[test]
fn identical_config_gives_identical_results() {
    let c = config(7, 24, 40);
    let (a, b) = c.pipelines().unwrap();
    let x = run_comparison(&a, &b).unwrap();
    let y = run_comparison(&a, &b).unwrap();
    assert_eq!(x, y);
    let mut c2 = c.clone();
    c2.experiment.seed += 1;
    let (a2, b2) = c2.pipelines().unwrap();
    assert_ne!(
        run_comparison(&a2, &b2).unwrap().conventional.trials,
        x.conventional.trials
    );
}

#[test]
fn proposed_exact_on_quantized_grid() {
    // every combination of level midpoints and signs, m <= 4, N <= 3
    for m in 1..=4usize {
        let mids: Vec<f64> = (0..=m).map(|k| (k as f64 + 0.5) / (m + 1) as f64).collect();
        for n in 1..=3usize {
            let c = config(m, n, 1);
            let cfg = pipeline(&c, Variant::Proposed);
            let levels = m + 1;
            let total = (levels * levels * 2).pow(n as u32);
            for mut idx in 0..total {
                let mut samples = Vec::new();
                let mut weights = Vec::new();
                for _ in 0..n {
                    samples.push(mids[idx % levels]);
                    idx /= levels;
                    let w = mids[idx % levels];
                    idx /= levels;
                    weights.push(if idx % 2 == 0 { w } else { -w });
                    idx /= 2;
                }
                let r = proposed_pipeline(&samples, &weights, &cfg).unwrap();
                let t = &r.trials[0];
                let want: i64 = samples
                    .iter()
                    .zip(&weights)
                    .map(|(&s, &w)| w.signum() as i64 * level(s, m).min(level(w.abs(), m)))
                    .sum();
                assert_eq!(t.decoded, want as f64, "m={m} n={n} {samples:?} {weights:?}");
                assert_eq!(t.oracle, want as f64);
            }
        }
    }
}

#[test]
fn conventional_unbiased_within_three_sigma() {
    let c = config(15, 6, 10_000);
    let cfg = pipeline(&c, Variant::Conventional);
    let samples = [0.8, 0.3, 0.55, 0.95, 0.1, 0.7];
    let weights = [0.6, -0.9, 0.25, -0.4, 0.85, 0.5];
    let r = conventional_pipeline(&samples, &weights, &cfg).unwrap();
    // oracle from the 4-bit ADC codes, computed here
    let full = 15.0;
    let oracle: f64 = samples
        .iter()
        .zip(&weights)
        .map(|(&s, &w)| {
            let a = adc_quantize(s, 4).unwrap().code as f64 / full;
            let b = adc_quantize(w.abs(), 4).unwrap().code as f64 / full;
            w.signum() * a * b
        })
        .sum();
    let t = r.trials.len() as f64;
    let mean = r.trials.iter().map(|x| x.decoded).sum::<f64>() / t;
    let var = r.trials.iter().map(|x| (x.decoded - mean).powi(2)).sum::<f64>() / (t - 1.0);
    let se = (var / t).sqrt();
    assert!((r.trials[0].oracle - oracle).abs() < 1e-12);
    assert!(
        (mean - oracle).abs() <= 3.0 * se,
        "mean {mean}, oracle {oracle}, se {se}"
    );
}

#[test]
fn flip_noise_stays_within_two_steps_at_one_flip_per_stream() {
    let trials = 2_000;
    // proposed: one quantization step is one AND count, L = m
    let mut c = config(15, 1, trials);
    c.pipeline.flip_probability = 1.0 / 15.0;
    c.pipeline.distribution = InputDistribution::Uniform;
    let r = run_pipeline(&pipeline(&c, Variant::Proposed), InputSource::Distribution).unwrap();
    assert!(
        r.stats.median_abs_error <= 2.0,
        "proposed median {}",
        r.stats.median_abs_error
    );
    assert!(r.stats.max_abs_error > 0.0, "flips must perturb some trials");

    // conventional: one step is 1/L of full scale
    let l = 15.0;
    let r = run_pipeline(&pipeline(&c, Variant::Conventional), InputSource::Distribution).unwrap();
    assert!(
        r.stats.median_abs_error <= 2.0 / l,
        "conventional median {}",
        r.stats.median_abs_error * l
    );

    // contrast: an MSB flip in a 4-bit word moves it by half of full range
    assert_eq!(binary_flip_delta(0b0101, 3), 8);
}

#[test]
fn flip_error_grows_with_probability() {
    let mut prev = -1.0;
    for p in [0.0, 0.02, 0.1, 0.3] {
        let mut c = config(15, 8, 400);
        c.pipeline.flip_probability = p;
        let r = run_pipeline(&pipeline(&c, Variant::Proposed), InputSource::Distribution).unwrap();
        assert!(r.stats.rmse > prev, "p={p}: rmse {} not above {prev}", r.stats.rmse);
        prev = r.stats.rmse;
    }
}

#[test]
fn every_logged_event_is_priced() {
    let c = config(15, 32, 8);
    for v in [Variant::Conventional, Variant::Proposed] {
        for gating in [
            scmem_core::converters::asc::Gating::Chain,
            scmem_core::converters::asc::Gating::Off,
        ] {
            let mut c = c.clone();
            c.pipeline.asc_gating = gating;
            c.pipeline.activity_profile = ActivityProfile::Structural;
            let cfg = pipeline(&c, v);
            let r = run_pipeline(&cfg, InputSource::Distribution).unwrap();
            let logged: BTreeSet<Event> = r.activity.events().collect();
            let priced: BTreeSet<Event> = r.structural_energy.categories.keys().copied().collect();
            assert_eq!(logged, priced);
            assert!(logged.iter().all(|e| cfg.energy_table.get(*e).is_some()));
            let sum: f64 = r.structural_energy.categories.values().map(|c| c.energy_fj).sum();
            assert!((sum - r.structural_energy.total_fj).abs() <= 1e-9 * sum);
        }
    }
}

#[test]
fn missing_table_entry_is_an_error() {
    let c = config(3, 4, 2);
    let mut cfg = pipeline(&c, Variant::Proposed);
    cfg.energy_table = scmem_core::EnergyTable::new().with(Event::SramCellAccess, 28.0);
    assert!(run_pipeline(&cfg, InputSource::Distribution).is_err());
}

#[test]
fn fixed_operands_must_match_n() {
    let c = config(3, 4, 2);
    let cfg = pipeline(&c, Variant::Proposed);
    let err = proposed_pipeline(&[0.1, 0.2], &[0.3, 0.4], &cfg).unwrap_err();
    assert!(matches!(err, scmem_core::Error::SizeMismatch(_)));
    let ops = Operands {
        samples: vec![0.1; 4],
        weights: vec![0.2; 3],
    };
    assert!(run_pipeline(&cfg, InputSource::Fixed(&ops)).is_err());
}

#[test]
fn comparison_requires_shared_parameters() {
    let c = config(3, 4, 2);
    let (a, mut b) = c.pipelines().unwrap();
    b.seed += 1;
    assert!(run_comparison(&a, &b).is_err());
}

#[test]
fn gaussian_inputs_gate_more_than_uniform() {
    let mut c = config(15, 64, 16);
    c.pipeline.distribution = InputDistribution::Uniform;
    let u = run_pipeline(&pipeline(&c, Variant::Proposed), InputSource::Distribution).unwrap();
    c.pipeline.distribution = InputDistribution::ZeroPeakedGaussian { sigma: 0.15 };
    let g = run_pipeline(&pipeline(&c, Variant::Proposed), InputSource::Distribution).unwrap();
    assert!(g.measured_gating_saving().unwrap() > u.measured_gating_saving().unwrap());
}

#[test]
fn longer_bsc_register_supported() {
    let mut c = config(15, 4, 4);
    c.pipeline.bsc_lfsr = LfsrPoly::shipped(16).unwrap();
    c.pipeline.stream_length = 256;
    let r = run_pipeline(&pipeline(&c, Variant::Conventional), InputSource::Distribution).unwrap();
    assert_eq!(r.trials.len(), 4);
}
