//! `rose`: batch experiments on rose/star quantum graph spectra.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 numerical
//! failure, 4 I/O failure.

mod experiment;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use experiment::{read_config_file, ExperimentConfig};
use rose_core::datafile::DataFile;
use rose_core::error::{Error, Result};
use rose_core::predictions::{
    form_factor_prediction, predict_r2_large, predict_r2_small, small_x_constant_montecarlo,
    small_x_constant_quadrature, Family,
};
use rose_core::secular::GraphKind;
use rose_core::stats::{empirical_form_factor, pair_correlation, poisson_surrogate, Histogram};
use rose_core::{RngStream, StreamPurpose};

#[derive(Parser)]
#[command(name = "rose", version, about = "Spectral statistics of rose and star quantum graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// dirac-rose, neumann-star or neumann-rose
    #[arg(long)]
    graph: Option<String>,
    /// Bond count B; `compare` accepts a comma-separated list
    #[arg(long, value_delimiter = ',')]
    bonds: Option<Vec<usize>>,
    /// Eigenvalues per realisation
    #[arg(long)]
    eigenvalues: Option<usize>,
    #[arg(long)]
    realisations: Option<usize>,
    /// Master seed; all randomness derives from it
    #[arg(long)]
    seed: Option<u64>,
    /// Histogram bin width Δ
    #[arg(long = "bin-width")]
    bin_width: Option<f64>,
    /// Histogram range and edge-correction margin
    #[arg(long = "x-max")]
    x_max: Option<f64>,
    /// Output path or prefix
    #[arg(long)]
    out: Option<String>,
    /// Draw fresh bond lengths every realisation (always on for star and
    /// Neumann-rose ensembles)
    #[arg(long = "resample-lengths")]
    resample_lengths: bool,
    /// Start spectra this multiple of the cluster-mixing threshold up in k,
    /// above the clustered low-k transient of near-equal bond lengths
    /// (0 keeps the full spectrum from k = 0)
    #[arg(long = "transient-cutoff")]
    transient_cutoff: Option<f64>,
    /// Flat key=value config file; flags take precedence over its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Debug override: comma-separated exact bond lengths
    #[arg(long = "fixed-length", value_delimiter = ',')]
    fixed_length: Option<Vec<f64>>,
    /// Debug override: comma-separated exact spin angles θ_b
    #[arg(long = "fixed-theta", value_delimiter = ',')]
    fixed_theta: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute and store raw eigenvalue spectra, one file per realisation
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Ensemble-averaged pair-correlation histogram
    Paircorr {
        #[command(flatten)]
        common: CommonArgs,
        /// Replace the graph ensemble by uniform Poisson surrogates
        #[arg(long)]
        poisson: bool,
    },
    /// Empirical and predicted spectral form factor on a τ grid
    Formfactor {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long = "tau-min", default_value_t = 0.05)]
        tau_min: f64,
        #[arg(long = "tau-max", default_value_t = 3.0)]
        tau_max: f64,
        #[arg(long = "tau-step", default_value_t = 0.05)]
        tau_step: f64,
        /// Hann window half-width in unfolded units; K is smoothed over a τ
        /// scale of roughly 1/window
        #[arg(long, default_value_t = 64.0)]
        window: f64,
    },
    /// Sample an analytic prediction curve
    Predict {
        /// rose-small, rose-large, star-small, star-large or formfactor
        #[arg(long)]
        family: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long)]
        out: String,
    },
    /// Slope constant c by quadrature and Monte Carlo, with verdict
    ConstantC {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Per-B deviation of empirical R₂ from the large-x tail formula
    Compare {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Spectrum { common } => merge(&common).and_then(|(c, _)| cmd_spectrum(&c)),
        Command::Paircorr { common, poisson } => {
            merge(&common).and_then(|(c, _)| cmd_paircorr(&c, poisson))
        }
        Command::Formfactor {
            common,
            tau_min,
            tau_max,
            tau_step,
            window,
        } => merge(&common).and_then(|(c, _)| cmd_formfactor(&c, tau_min, tau_max, tau_step, window)),
        Command::Predict {
            family,
            from,
            to,
            step,
            out,
        } => cmd_predict(&family, from, to, step, &out),
        Command::ConstantC {
            samples,
            tolerance,
            seed,
        } => cmd_constant_c(samples, tolerance, seed),
        Command::Compare { common } => merge(&common).and_then(|(c, list)| cmd_compare(&c, &list)),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("rose: {error}");
            ExitCode::from(exit_code(&error))
        }
    }
}

fn exit_code(error: &Error) -> u8 {
    match error {
        Error::Io { .. } => 4,
        Error::NumericalFailure(_) | Error::PoleProximity { .. } => 3,
        _ => 2,
    }
}

/// Resolves one setting: flag, then config-file key, then default.
fn pick<T: FromStr + Clone>(
    flag: Option<T>,
    file: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T> {
    if let Some(value) = flag {
        return Ok(value);
    }
    match file.get(key) {
        Some(raw) => raw
            .parse()
            .map_err(|_| Error::invalid_argument(format!("config key {key}: cannot parse {raw:?}"))),
        None => Ok(default),
    }
}

fn parse_graph(name: &str) -> Result<GraphKind> {
    match name {
        "dirac-rose" => Ok(GraphKind::DiracRose),
        "neumann-star" => Ok(GraphKind::NeumannStar),
        "neumann-rose" => Ok(GraphKind::NeumannRose),
        other => Err(Error::invalid_argument(format!(
            "unknown graph kind {other:?}; expected dirac-rose, neumann-star or neumann-rose"
        ))),
    }
}

/// Merges flags, optional config file and defaults into a validated config
/// plus the full bond-count list (for `compare`).
fn merge(common: &CommonArgs) -> Result<(ExperimentConfig, Vec<usize>)> {
    let file = match &common.config {
        Some(path) => read_config_file(path)?,
        None => HashMap::new(),
    };
    let graph_name = pick(
        common.graph.clone(),
        &file,
        "graph",
        "dirac-rose".to_string(),
    )?;
    let bonds: Vec<usize> = match &common.bonds {
        Some(list) => list.clone(),
        None => match file.get("bonds") {
            Some(raw) => raw
                .split(',')
                .map(|part| {
                    part.trim().parse().map_err(|_| {
                        Error::invalid_argument(format!("config key bonds: cannot parse {raw:?}"))
                    })
                })
                .collect::<Result<_>>()?,
            None => vec![101],
        },
    };
    if bonds.is_empty() {
        return Err(Error::invalid_argument("at least one bond count required"));
    }
    let resample = common.resample_lengths
        || file
            .get("resample-lengths")
            .is_some_and(|v| v == "true" || v == "1");
    let config = ExperimentConfig {
        graph: parse_graph(&graph_name)?,
        bonds: bonds[0],
        eigenvalues: pick(common.eigenvalues, &file, "eigenvalues", 20_000)?,
        realisations: pick(common.realisations, &file, "realisations", 20)?,
        seed: pick(common.seed, &file, "seed", 1)?,
        resample_lengths: resample,
        transient_cutoff: pick(common.transient_cutoff, &file, "transient-cutoff", 2.0)?,
        bin_width: pick(common.bin_width, &file, "bin-width", 0.05)?,
        x_max: pick(common.x_max, &file, "x-max", 10.0)?,
        out: pick(common.out.clone(), &file, "out", "rose-out".to_string())?,
        threads: pick(common.threads, &file, "threads", 0)?,
        fixed_lengths: common.fixed_length.clone(),
        fixed_angles: common.fixed_theta.clone(),
    };
    config.validate()?;
    Ok((config, bonds))
}

fn base_file(config: &ExperimentConfig, command: &str) -> DataFile {
    let mut file = DataFile::new().with_header("command", command);
    for (key, value) in config.header_entries() {
        file.header.push((key, value));
    }
    file
}

fn cmd_spectrum(config: &ExperimentConfig) -> Result<()> {
    let spectra = config.spectra()?;
    let mut manifest = base_file(config, "spectrum");
    for (i, spectrum) in spectra.iter().enumerate() {
        let mut file = base_file(config, "spectrum");
        file.header.push(("realisation".into(), i.to_string()));
        file.rows = spectrum
            .roots
            .iter()
            .enumerate()
            .map(|(n, &k)| ((n + 1) as f64, k))
            .collect();
        file.write_to(Path::new(&format!("{}-r{i:04}.dat", config.out)))?;
        manifest.rows.push((i as f64, spectrum.skipped_intervals as f64));
    }
    manifest
        .header
        .push(("columns".into(), "realisation skipped-intervals".into()));
    manifest.write_to(Path::new(&format!("{}-manifest.dat", config.out)))?;
    Ok(())
}

fn histogram_rows(histogram: &Histogram) -> Vec<(f64, f64)> {
    histogram
        .bin_centres()
        .zip(histogram.values.iter().copied())
        .collect()
}

fn surrogate_ensemble(config: &ExperimentConfig) -> Vec<rose_core::UnfoldedSpectrum> {
    (0..config.realisations as u64)
        .map(|i| {
            poisson_surrogate(
                config.eigenvalues,
                RngStream::new(config.seed, i, StreamPurpose::Surrogate),
            )
        })
        .collect()
}

fn cmd_paircorr(config: &ExperimentConfig, poisson: bool) -> Result<()> {
    let ensemble = if poisson {
        surrogate_ensemble(config)
    } else {
        config.unfolded_ensemble()?
    };
    let histogram = pair_correlation(&ensemble, config.bin_width, config.x_max)?;
    let mut file = base_file(config, "paircorr");
    file.header.push(("bin-width".into(), config.bin_width.to_string()));
    file.header.push(("x-max".into(), config.x_max.to_string()));
    file.header.push(("poisson".into(), poisson.to_string()));
    file.header.push(("pairs".into(), histogram.pair_count.to_string()));
    file.header.push(("levels".into(), histogram.level_count.to_string()));
    file.rows = histogram_rows(&histogram);
    file.write_to(Path::new(&config.out))
}

fn cmd_formfactor(
    config: &ExperimentConfig,
    tau_min: f64,
    tau_max: f64,
    tau_step: f64,
    window: f64,
) -> Result<()> {
    if !(tau_min > 0.0 && tau_max > tau_min && tau_step > 0.0) {
        return Err(Error::invalid_argument(
            "require 0 < tau-min < tau-max and positive tau-step",
        ));
    }
    let grid = sample_grid(tau_min, tau_max, tau_step);
    let ensemble = config.unfolded_ensemble()?;
    let curve = empirical_form_factor(&ensemble, &grid, window)?;
    let mut empirical = base_file(config, "formfactor");
    empirical.header.push(("window".into(), window.to_string()));
    empirical.rows = grid.iter().copied().zip(curve.values.iter().copied()).collect();
    empirical.write_to(Path::new(&format!("{}-empirical.dat", config.out)))?;
    let mut predicted = base_file(config, "formfactor");
    predicted.header.push(("curve".into(), "diagonal-approximation".into()));
    predicted.rows = grid
        .iter()
        .map(|&tau| Ok((tau, form_factor_prediction(tau)?)))
        .collect::<Result<_>>()?;
    predicted.write_to(Path::new(&format!("{}-predicted.dat", config.out)))
}

fn sample_grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    let count = ((to - from) / step).round() as usize + 1;
    (0..count)
        .map(|i| from + i as f64 * step)
        .filter(|&x| x <= to + 0.5 * step)
        .collect()
}

fn cmd_predict(family: &str, from: f64, to: f64, step: f64, out: &str) -> Result<()> {
    if !(to > from && step > 0.0) {
        return Err(Error::invalid_argument(
            "require from < to and positive step",
        ));
    }
    let mut file = DataFile::new()
        .with_header("command", "predict")
        .with_header("family", family)
        .with_header("from", from)
        .with_header("to", to)
        .with_header("step", step);
    let grid = sample_grid(from, to, step);
    let evaluate: Box<dyn Fn(f64) -> Result<f64>> = match family {
        "rose-small" => {
            let c = small_x_constant_quadrature(1e-10)?;
            file.header.push(("c".into(), format!("{c:.12}")));
            Box::new(move |x| predict_r2_small(x, Family::Rose))
        }
        "star-small" => Box::new(|x| predict_r2_small(x, Family::Star)),
        "rose-large" => Box::new(|x| predict_r2_large(x, Family::Rose)),
        "star-large" => Box::new(|x| predict_r2_large(x, Family::Star)),
        "formfactor" => Box::new(form_factor_prediction),
        other => {
            return Err(Error::invalid_argument(format!(
                "unknown family {other:?}; expected rose-small, rose-large, star-small, star-large or formfactor"
            )))
        }
    };
    file.rows = grid
        .iter()
        .map(|&x| Ok((x, evaluate(x)?)))
        .collect::<Result<_>>()?;
    file.write_to(Path::new(out))
}

fn cmd_constant_c(samples: usize, tolerance: f64, seed: u64) -> Result<()> {
    let quadrature = small_x_constant_quadrature(tolerance)?;
    let (mean, stderr) = small_x_constant_montecarlo(
        samples,
        RngStream::new(seed, 0, StreamPurpose::Amplitudes),
    )?;
    let difference = (quadrature - mean).abs();
    let verdict = if difference < 4.0 * stderr { "PASS" } else { "FAIL" };
    println!("quadrature  c = {quadrature:.12}");
    println!("monte-carlo c = {mean:.12} +/- {stderr:.3e}  ({samples} samples)");
    println!(
        "verdict: {verdict}  (|difference| = {difference:.3e}, 4*stderr = {:.3e})",
        4.0 * stderr
    );
    Ok(())
}

fn cmd_compare(config: &ExperimentConfig, bond_list: &[usize]) -> Result<()> {
    let family = match config.graph {
        GraphKind::DiracRose => Family::Rose,
        GraphKind::NeumannStar | GraphKind::NeumannRose => Family::Star,
    };
    for &b in bond_list {
        let mut run = config.clone();
        run.bonds = b;
        run.validate()?;
        let ensemble = run.unfolded_ensemble()?;
        let histogram = pair_correlation(&ensemble, run.bin_width, run.x_max)?;
        let mut file = base_file(&run, "compare");
        let mut deviation_sum = 0.0;
        let mut deviation_bins = 0usize;
        for (centre, &value) in histogram.bin_centres().zip(&histogram.values) {
            if centre <= 0.5 {
                continue;
            }
            let difference = (value - predict_r2_large(centre, family)?).abs();
            file.rows.push((centre, difference));
            if (2.0..=10.0).contains(&centre) {
                deviation_sum += difference;
                deviation_bins += 1;
            }
        }
        if deviation_bins > 0 {
            let mad = deviation_sum / deviation_bins as f64;
            file.header
                .push(("mean-abs-deviation-x-2-10".into(), format!("{mad:.6e}")));
            println!("B={b}: mean |R2 - tail| over x in [2,10] = {mad:.6e}");
        }
        file.write_to(Path::new(&format!("{}-B{b}.dat", config.out)))?;
    }
    Ok(())
}
