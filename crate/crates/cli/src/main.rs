use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use scmem_core::config::ConfigFile;
use scmem_core::converters::asc::expected_enabled_uniform;
use scmem_core::distribution::{expected_enabled_sas, expected_gating_saving};
use scmem_core::mac::{count_products, decode_voltage, mac_evaluate, phase1_voltages};
use scmem_core::pipeline::{run_comparison, run_pipeline, InputSource, Variant};
use scmem_core::report::{energy_csv, trials_csv, Summary};
use scmem_core::{selftest, Bitstream, Error, InputDistribution, MacConfig, MacInputs, SignedStream};

#[derive(Parser, Debug)]
#[command(name = "scmem", version, about = "Stochastic-computing memory + MAC simulator")]
struct Cli {
    /// JSON config file; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report files; nothing is written when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `experiment.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(clap::Args, Debug, Clone, Default)]
struct Overrides {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n_inputs: Option<usize>,
    /// Conventional bitstream length.
    #[arg(long)]
    length: Option<usize>,
    /// Switches to a zero-peaked Gaussian input distribution with this sigma.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    flip_p: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one MAC from explicit thermometer bitstreams.
    Mac {
        /// Comma-separated input streams, e.g. 110,111.
        #[arg(long = "in", value_delimiter = ',', required = true)]
        inputs: Vec<String>,
        /// Comma-separated signed weight streams, e.g. +100,-110.
        #[arg(long = "w", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        weights: Vec<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        vdd: Option<f64>,
    },
    /// Run the conventional and proposed pipelines on the same operands.
    Compare {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run `compare` over the cartesian product of the given value lists.
    Sweep {
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        n_inputs: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        length: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        sigma: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        flip_p: Vec<f64>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Sense-amplifier gating statistics under several input distributions.
    AscStats {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.05, 0.1, 0.15, 0.25, 0.5])]
        sigma: Vec<f64>,
    },
    /// Run the built-in exhaustive consistency checks.
    Selftest,
}

enum Failure {
    Core(Error),
    Io(String, std::io::Error),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::SizeMismatch(_) | Error::LengthMismatch { .. }) => 3,
            Failure::Core(_) => 2,
            Failure::Io(..) => 4,
            Failure::Other(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Io(path, e) => format!("{path}: {e}"),
            Failure::Other(s) => s.clone(),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn load_config(cli: &Cli) -> Outcome<ConfigFile> {
    let mut cfg = match &cli.config {
        None => ConfigFile::default(),
        Some(path) => ConfigFile::load(path).map_err(|e| Failure::Io(path.display().to_string(), e))??,
    };
    if let Some(seed) = cli.seed {
        cfg.experiment.seed = seed;
    }
    Ok(cfg)
}

fn apply(cfg: &mut ConfigFile, o: &Overrides) {
    if let Some(m) = o.m {
        cfg.mac.m = m;
        // tables tied to the default m follow the override
        if cfg.energy_tables == ConfigFile::default().energy_tables {
            cfg.energy_tables = None;
        }
    }
    if let Some(n) = o.n_inputs {
        cfg.mac.n_inputs = n;
    }
    if let Some(l) = o.length {
        cfg.pipeline.stream_length = l;
    }
    if let Some(sigma) = o.sigma {
        cfg.pipeline.distribution = InputDistribution::ZeroPeakedGaussian { sigma };
    }
    if let Some(p) = o.flip_p {
        cfg.pipeline.flip_probability = p;
    }
    if let Some(t) = o.trials {
        cfg.experiment.trials = t;
    }
}

fn run(cli: &Cli) -> Outcome<()> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Mac {
            inputs,
            weights,
            m,
            vdd,
        } => run_mac(&cfg, inputs, weights, *m, *vdd),
        Command::Compare { overrides } => {
            let mut cfg = cfg;
            apply(&mut cfg, overrides);
            let summary = compare(&cfg, cli.out.as_deref(), cli.format)?;
            print!("{}", summary.render());
            Ok(())
        }
        Command::Sweep {
            m,
            n_inputs,
            length,
            sigma,
            flip_p,
            trials,
        } => sweep(cli, &cfg, m, n_inputs, length, sigma, flip_p, *trials),
        Command::AscStats { m, sigma } => asc_stats(cli, &cfg, m.unwrap_or(cfg.mac.m), sigma),
        Command::Selftest => {
            let results = selftest::run_all()?;
            let mut failed = 0;
            for r in &results {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                failed += usize::from(!r.passed);
            }
            if failed > 0 {
                return Err(Failure::Other(format!("{failed} selftest check(s) failed")));
            }
            Ok(())
        }
    }
}

fn run_mac(cfg: &ConfigFile, inputs: &[String], weights: &[String], m: Option<usize>, vdd: Option<f64>) -> Outcome<()> {
    let inputs = inputs
        .iter()
        .map(|s| s.parse::<Bitstream>())
        .collect::<scmem_core::Result<Vec<_>>>()?;
    let weights = weights
        .iter()
        .map(|s| s.parse::<SignedStream>())
        .collect::<scmem_core::Result<Vec<_>>>()?;
    let ops = MacInputs::new(inputs, weights)?;
    let mac = MacConfig::new(m.unwrap_or(ops.m()), ops.n_inputs(), vdd.unwrap_or(cfg.mac.vdd))?;
    let out = mac_evaluate(&ops, &mac)?;
    let counts = count_products(&ops);
    let (vp, vn) = phase1_voltages(counts, &mac)?;
    println!("n_p = {}, n_n = {}", counts.positive, counts.negative);
    println!("VP = {vp:.9} V, VN = {vn:.9} V");
    println!("V = {:.9} V", out.voltage);
    println!("decoded = {}", decode_voltage(out.voltage, &mac)?);
    Ok(())
}

/// Writes via a temporary sibling and a rename, so readers never see a
/// partial file.
fn write_atomic(path: &Path, contents: &str) -> Outcome<()> {
    let io = |e| Failure::Io(path.display().to_string(), e);
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

fn ensure_dir(dir: &Path) -> Outcome<()> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.display().to_string(), e))
}

fn compare(cfg: &ConfigFile, out: Option<&Path>, format: Format) -> Outcome<Summary> {
    let (conv, prop) = cfg.pipelines()?;
    let cmp = run_comparison(&conv, &prop)?;
    let summary = Summary::from_comparison(&cmp);
    if let Some(dir) = out {
        ensure_dir(dir)?;
        if format.csv() {
            write_atomic(&dir.join("trials_conventional.csv"), &trials_csv(&cmp.conventional))?;
            write_atomic(&dir.join("trials_proposed.csv"), &trials_csv(&cmp.proposed))?;
            write_atomic(&dir.join("energy.csv"), &energy_csv(&cmp))?;
        }
        if format.json() {
            write_atomic(&dir.join("summary.json"), &summary.to_json())?;
        }
    }
    Ok(summary)
}

#[derive(Serialize)]
struct SweepRow {
    point: usize,
    m: usize,
    n_inputs: usize,
    stream_length: usize,
    sigma: Option<f64>,
    flip_p: f64,
    conventional_rmse: f64,
    proposed_rmse: f64,
    conventional_fj: f64,
    proposed_fj: f64,
    reduction_percent: f64,
    structural_reduction_percent: f64,
    gating_saving: Option<f64>,
}

const SWEEP_CSV_HEADER: &str = "point,m,n_inputs,stream_length,sigma,flip_p,conventional_rmse,proposed_rmse,conventional_fj,proposed_fj,reduction_percent,structural_reduction_percent,gating_saving";

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    cli: &Cli,
    base: &ConfigFile,
    ms: &[usize],
    ns: &[usize],
    lengths: &[usize],
    sigmas: &[f64],
    flips: &[f64],
    trials: Option<u64>,
) -> Outcome<()> {
    let axis = |v: &[usize]| -> Vec<Option<usize>> {
        if v.is_empty() {
            vec![None]
        } else {
            v.iter().copied().map(Some).collect()
        }
    };
    let axis_f = |v: &[f64]| -> Vec<Option<f64>> {
        if v.is_empty() {
            vec![None]
        } else {
            v.iter().copied().map(Some).collect()
        }
    };
    let mut points = Vec::new();
    for m in axis(ms) {
        for n in axis(ns) {
            for l in axis(lengths) {
                for s in axis_f(sigmas) {
                    for p in axis_f(flips) {
                        points.push(Overrides {
                            m,
                            n_inputs: n,
                            length: l,
                            sigma: s,
                            flip_p: p,
                            trials,
                        });
                    }
                }
            }
        }
    }

    let rows = points
        .par_iter()
        .enumerate()
        .map(|(i, o)| {
            let mut cfg = base.clone();
            apply(&mut cfg, o);
            let dir = cli.out.as_ref().map(|d| d.join(format!("point-{i:04}")));
            let s = compare(&cfg, dir.as_deref(), cli.format)?;
            Ok(SweepRow {
                point: i,
                m: s.m,
                n_inputs: s.n_inputs,
                stream_length: s.stream_length,
                sigma: match cfg.pipeline.distribution {
                    InputDistribution::ZeroPeakedGaussian { sigma } => Some(sigma),
                    _ => None,
                },
                flip_p: s.flip_probability,
                conventional_rmse: s.conventional.stats.rmse,
                proposed_rmse: s.proposed.stats.rmse,
                conventional_fj: s.conventional.total_fj,
                proposed_fj: s.proposed.total_fj,
                reduction_percent: s.reduction_percent,
                structural_reduction_percent: s.structural_reduction_percent,
                gating_saving: s.proposed.gating_saving,
            })
        })
        .collect::<Outcome<Vec<_>>>()?;

    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.point,
            r.m,
            r.n_inputs,
            r.stream_length,
            opt(r.sigma),
            r.flip_p,
            r.conventional_rmse,
            r.proposed_rmse,
            r.conventional_fj,
            r.proposed_fj,
            r.reduction_percent,
            r.structural_reduction_percent,
            opt(r.gating_saving)
        )
        .unwrap();
    }
    if let Some(dir) = &cli.out {
        ensure_dir(dir)?;
        if cli.format.csv() {
            write_atomic(&dir.join("sweep.csv"), &csv)?;
        }
        if cli.format.json() {
            let json = serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n";
            write_atomic(&dir.join("sweep.json"), &json)?;
        }
    }
    println!(
        "{:>5} {:>3} {:>5} {:>6} {:>7} {:>8} {:>12} {:>12} {:>10} {:>10}",
        "point", "m", "N", "L", "sigma", "flip_p", "conv_rmse", "prop_rmse", "reduction", "gating"
    );
    for r in &rows {
        println!(
            "{:>5} {:>3} {:>5} {:>6} {:>7} {:>8} {:>12.6} {:>12.6} {:>9.1}% {:>10}",
            r.point,
            r.m,
            r.n_inputs,
            r.stream_length,
            r.sigma.map_or_else(|| "-".into(), |s| format!("{s}")),
            r.flip_p,
            r.conventional_rmse,
            r.proposed_rmse,
            r.reduction_percent,
            r.gating_saving
                .map_or_else(|| "-".into(), |g| format!("{:.1}%", 100.0 * g))
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct AscRow {
    distribution: String,
    expected_enabled: f64,
    expected_saving: f64,
    measured_saving: f64,
    energy_per_conversion_fj: f64,
}

fn asc_stats(cli: &Cli, base: &ConfigFile, m: usize, sigmas: &[f64]) -> Outcome<()> {
    let mut dists = vec![InputDistribution::Uniform];
    dists.extend(
        sigmas
            .iter()
            .map(|&sigma| InputDistribution::ZeroPeakedGaussian { sigma }),
    );
    let mut cfg = base.clone();
    cfg.mac.m = m;
    if cfg.energy_tables == ConfigFile::default().energy_tables {
        cfg.energy_tables = None;
    }
    let sa_fj = cfg
        .tables()
        .proposed
        .get(scmem_core::Event::SaFire)
        .ok_or_else(|| Failure::Core(Error::UnknownEvent("sa_fire missing from proposed table".into())))?;

    let rows = dists
        .iter()
        .map(|d| {
            d.validate(cfg.mac.n_inputs)?;
            let mut c = cfg.clone();
            c.pipeline.distribution = d.clone();
            let run = run_pipeline(&c.pipeline(Variant::Proposed)?, InputSource::Distribution)?;
            let enabled = expected_enabled_sas(m, d);
            Ok(AscRow {
                distribution: d.label(),
                expected_enabled: enabled,
                expected_saving: expected_gating_saving(m, d),
                measured_saving: run.measured_gating_saving().unwrap_or(0.0),
                energy_per_conversion_fj: enabled * sa_fj,
            })
        })
        .collect::<Outcome<Vec<_>>>()?;

    println!(
        "m = {m}; ungated {:.2} fJ/conversion; uniform closed form {:.6} enabled",
        m as f64 * sa_fj,
        expected_enabled_uniform(m)
    );
    println!(
        "{:<36} {:>10} {:>10} {:>10} {:>12}",
        "distribution", "enabled", "saving", "measured", "fJ/conv"
    );
    for r in &rows {
        println!(
            "{:<36} {:>10.4} {:>9.1}% {:>9.1}% {:>12.2}",
            r.distribution,
            r.expected_enabled,
            100.0 * r.expected_saving,
            100.0 * r.measured_saving,
            r.energy_per_conversion_fj
        );
    }
    if let Some(dir) = &cli.out {
        ensure_dir(dir)?;
        if cli.format.csv() {
            let mut csv = String::from(
                "distribution,expected_enabled,expected_saving,measured_saving,energy_per_conversion_fj\n",
            );
            for r in &rows {
                writeln!(
                    csv,
                    "{},{},{},{},{}",
                    r.distribution,
                    r.expected_enabled,
                    r.expected_saving,
                    r.measured_saving,
                    r.energy_per_conversion_fj
                )
                .unwrap();
            }
            write_atomic(&dir.join("asc_stats.csv"), &csv)?;
        }
        if cli.format.json() {
            let json = serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n";
            write_atomic(&dir.join("asc_stats.json"), &json)?;
        }
    }
    Ok(())
}
