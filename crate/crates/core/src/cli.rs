//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 for invalid flags or settings, 2 when an
//! input file cannot be read or parsed or an output cannot be written.
//! `QNR_SEED` in the environment overrides `--seed`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::concentration::{concentration_experiment, ConcentrationConfig};
use crate::driver::{compute_qnr_traced, random_sampling_baseline, DriverConfig, SampleBudget, StopRule};
use crate::error::{Error, Result};
use crate::io::{write_cloud, CloudMetadata};
use crate::linalg::BlockMatrix;
use crate::svg::save_svg;
use crate::zoo::{generate, load_block_matrix};

#[derive(Parser, Debug)]
#[command(name = "qnr", version, about = "Quadratic numerical range of 2x2 block matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a QNR point cloud.
    Compute(ComputeArgs),
    /// Measure how sampled reduced spectra concentrate as the dimension grows.
    Concentration(ConcentrationArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Boundary-seeking ascent seeded from a box grid.
    Algorithm,
    /// Uniform random vector pairs.
    Sampling,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    /// Built-in matrix: a1, a2, a3, a4 or a5.
    #[arg(long = "gen", value_name = "NAME", conflicts_with = "matrix", required_unless_present = "matrix")]
    generator: Option<String>,
    /// Matrix file (Matrix Market or JSON).
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,
    /// Size of the upper-left block for --matrix.
    #[arg(long, value_name = "K")]
    split: Option<usize>,
    /// Total dimension for the sized families a1 and a5.
    #[arg(long, value_name = "N")]
    dim: Option<usize>,
}

#[derive(Args, Debug)]
struct ComputeArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long, value_enum, default_value = "algorithm")]
    method: Method,
    /// Wall-clock budget such as 60s, 500ms, 2m or 1h.
    #[arg(long, value_parser = parse_duration)]
    budget: Option<Duration>,
    /// Fixed number of outer iterations instead of a time budget.
    #[arg(long, conflicts_with = "budget")]
    iterations: Option<usize>,
    /// Number of samples for --method sampling.
    #[arg(long, conflicts_with = "budget")]
    samples: Option<usize>,
    /// Initial random pairs for --method algorithm.
    #[arg(long, default_value_t = 256)]
    initial_samples: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file, .csv or .json.
    #[arg(long)]
    out: PathBuf,
    /// Optional scatter plot.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Suppress progress lines on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct ConcentrationArgs {
    /// Built-in family: a1 or a5.
    #[arg(long = "gen", value_name = "NAME")]
    generator: String,
    /// Total dimensions, comma separated and increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Distance thresholds, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    eps: Vec<f64>,
    /// JSON report; one scatter plot per dimension is written beside it.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampled points drawn in each plot.
    #[arg(long, default_value_t = 20_000)]
    plot_points: usize,
}

/// `60s`, `500ms`, `2m`, `1h`, or a bare number of seconds.
pub fn parse_duration(text: &str) -> Result<Duration, String> {
    let t = text.trim();
    let split = t.find(|ch: char| ch.is_ascii_alphabetic()).unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let value: f64 = num.parse().map_err(|_| format!("invalid duration {text:?}"))?;
    let secs = match unit {
        "" | "s" => value,
        "ms" => value / 1000.0,
        "m" | "min" => value * 60.0,
        "h" => value * 3600.0,
        _ => return Err(format!("unknown duration unit {unit:?} in {text:?}")),
    };
    Duration::try_from_secs_f64(secs).map_err(|_| format!("invalid duration {text:?}"))
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Io { .. } | Error::SplitOutOfRange { .. } => 2,
        _ => 1,
    }
}

fn load(args: &MatrixArgs) -> Result<(BlockMatrix, String)> {
    match (&args.generator, &args.matrix) {
        (Some(name), _) => {
            let block = generate(name, args.dim)?;
            Ok((block.clone(), format!("{} (dim {})", name.to_ascii_lowercase(), block.dim())))
        }
        (None, Some(path)) => Ok((load_block_matrix(path, args.split)?, path.display().to_string())),
        (None, None) => Err(Error::InvalidConfig("one of --gen or --matrix is required".into())),
    }
}

fn compute(args: &ComputeArgs, seed: u64) -> Result<()> {
    let (block, matrix) = load(&args.matrix)?;
    let (cloud, method, budget) = match args.method {
        Method::Algorithm => {
            if args.samples.is_some() {
                return Err(Error::InvalidConfig("--samples applies to --method sampling".into()));
            }
            let (stop, budget) = match (args.iterations, args.budget) {
                (Some(n), _) => (StopRule::OuterIterations(n), format!("{n} iterations")),
                (None, Some(d)) => (StopRule::Time(d), format!("{}s", d.as_secs_f64())),
                (None, None) => (StopRule::Time(Duration::from_secs(60)), "60s".into()),
            };
            let mut cfg = DriverConfig::new(stop, seed);
            cfg.alpha = args.alpha;
            cfg.initial_samples = args.initial_samples;
            let quiet = args.quiet;
            let (cloud, stats) = compute_qnr_traced(&block, &cfg, |r| {
                if !quiet {
                    eprintln!(
                        "iteration {} pass {} boxes {} starts {} penalty {:.4} points {} elapsed {:.2}s",
                        r.iteration,
                        if r.pass == 0 { "W" } else { "W~" },
                        r.boxes,
                        r.starts,
                        r.penalty,
                        r.cloud_len,
                        r.elapsed.as_secs_f64()
                    );
                }
            })?;
            if !quiet {
                eprintln!("stopped by {:?} after {} seeks", stats.stopped_by, stats.seeks);
            }
            (cloud, "algorithm", budget)
        }
        Method::Sampling => {
            if args.iterations.is_some() {
                return Err(Error::InvalidConfig("--iterations applies to --method algorithm".into()));
            }
            let (budget, text) = match (args.samples, args.budget) {
                (Some(n), _) => (SampleBudget::Count(n), format!("{n} samples")),
                (None, Some(d)) => (SampleBudget::Time(d), format!("{}s", d.as_secs_f64())),
                (None, None) => (SampleBudget::Count(100_000), "100000 samples".into()),
            };
            (random_sampling_baseline(&block, budget, args.alpha, seed, false), "sampling", text)
        }
    };
    let metadata = CloudMetadata { matrix, seed, budget, method: method.into(), points: cloud.len() };
    write_cloud(&args.out, &cloud, &metadata)?;
    if let Some(svg) = &args.svg {
        save_svg(&cloud, svg)?;
    }
    Ok(())
}

/// `report.json` -> `report_dim8.svg` in the same directory.
fn panel_path(out: &Path, dim: usize) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}_dim{dim}.svg"))
}

fn concentration(args: &ConcentrationArgs, seed: u64) -> Result<()> {
    let name = args.generator.to_ascii_lowercase();
    if !matches!(name.as_str(), "a1" | "a5") {
        return Err(Error::InvalidConfig(format!("concentration needs a sized family (a1 or a5), got {name:?}")));
    }
    let mut cfg = ConcentrationConfig::new(args.dims.clone(), args.samples, args.eps.clone(), seed);
    cfg.keep_points = args.plot_points;
    let (report, clouds) = concentration_experiment(|d| generate(&name, Some(d)), &cfg)?;
    let text = serde_json::to_string_pretty(&report).expect("plain data serializes");
    std::fs::write(&args.out, text + "\n").map_err(|e| Error::io(&args.out, e))?;
    for (dim, cloud) in report.dims.iter().zip(&clouds) {
        if !cloud.is_empty() {
            save_svg(cloud, &panel_path(&args.out, *dim))?;
        }
    }
    Ok(())
}

/// Run the CLI with an explicit seed override instead of reading
/// `QNR_SEED`.
pub fn run_with_seed_override<I, T>(args: I, seed_override: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let seed = match seed_override.map(|s| s.trim().parse::<u64>()) {
        None => None,
        Some(Ok(s)) => Some(s),
        Some(Err(_)) => {
            eprintln!("error: QNR_SEED must be a nonnegative integer");
            return 1;
        }
    };
    let result = match &cli.command {
        Command::Compute(a) => compute(a, seed.unwrap_or(a.seed)),
        Command::Concentration(a) => concentration(a, seed.unwrap_or(a.seed)),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let seed = std::env::var("QNR_SEED").ok();
    run_with_seed_override(args, seed.as_deref())
}
