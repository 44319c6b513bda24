//! The `manifuse` command-line tool.
//!
//! Every subcommand resolves its settings as flags over `--config` file
//! over defaults, writes its outputs, and records a manifest from which the
//! run can be replayed (`--config <manifest>`).

mod commands;
pub mod manifest;
pub mod settings;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};

pub use commands::{fusion_config, toy_config};

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "MANIFUSE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "manifuse",
    version,
    about = "Multimodal fusion by alternating diffusion and common graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate the rotating-arrows dataset.
    GenToy(GenToyArgs),
    /// Embed a dataset with one scheme.
    Embed(EmbedArgs),
    /// Score an embedding against ground truth.
    Eval(EvalArgs),
    /// Scatter plot of two embedding coordinates as SVG.
    Plot(PlotArgs),
    /// Write a distance matrix.
    Distances(DistancesArgs),
}

#[derive(Debug, Args)]
struct GenToyArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// key=value settings file (flags take precedence).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    d_proj: Option<String>,
    #[arg(long)]
    arrow_length: Option<String>,
    #[arg(long)]
    arrow_thickness: Option<String>,
    /// Append the frequency-modulated noise sensor.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    noise_sensor: Option<String>,
    #[arg(long)]
    noise_rate: Option<String>,
    #[arg(long)]
    noise_window: Option<String>,
}

/// Dataset location: a `gen-toy` directory or an explicit sensor list.
#[derive(Debug, Args)]
struct DataArgs {
    /// Directory written by `gen-toy`.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Comma-separated sensor matrix files, in sensor order.
    #[arg(long, value_delimiter = ',')]
    sensors: Option<Vec<PathBuf>>,
}

#[derive(Debug, Args)]
struct FusionArgs {
    /// Diffusion time.
    #[arg(long)]
    t: Option<String>,
    /// Median-scale multiplier, one value or one per sensor (comma-separated).
    #[arg(long)]
    sensor_multiplier: Option<String>,
    #[arg(long)]
    union_multiplier: Option<String>,
    /// euclidean or mahalanobis.
    #[arg(long)]
    metric: Option<String>,
    /// `gap`, `gap:<l_max>` or a fixed count.
    #[arg(long)]
    pair_truncation: Option<String>,
    /// `gap`, `gap:<l_max>` or a fixed count.
    #[arg(long)]
    final_truncation: Option<String>,
    /// squared or unsquared.
    #[arg(long)]
    union_exponent: Option<String>,
    /// `none` or the target dimension.
    #[arg(long)]
    projection_dim: Option<String>,
    /// Neighbourhood size for local covariances.
    #[arg(long)]
    knn: Option<String>,
    /// `trace:<fraction>` or `abs:<value>`.
    #[arg(long)]
    shrinkage: Option<String>,
    /// `auto` or the covariance rank.
    #[arg(long)]
    rank: Option<String>,
    /// Seed for the random pre-projection.
    #[arg(long)]
    seed: Option<String>,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// dm, ad, common-graph, common-graph-mahalanobis, concat or mult.
    #[arg(long)]
    scheme: Option<String>,
    /// For `ad`: `all` or a 1-based ordered pair such as `1,2`.
    #[arg(long)]
    pair: Option<String>,
    #[command(flatten)]
    fusion: FusionArgs,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    embedding: PathBuf,
    /// Ground-truth file written by `gen-toy`.
    #[arg(long)]
    truth: PathBuf,
    /// Report file; the report always goes to stdout as well.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Neighbours in the k-NN classifier.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    repeats: Option<String>,
    #[arg(long)]
    train_fraction: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Quantization bins for the class labels.
    #[arg(long)]
    bins: Option<String>,
    /// Ground-truth angle used as the class label.
    #[arg(long)]
    label: Option<String>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// 0-based coordinate on the horizontal axis.
    #[arg(long)]
    x: Option<String>,
    /// 0-based coordinate on the vertical axis.
    #[arg(long)]
    y: Option<String>,
    /// Ground-truth column that colours the points, or `none`.
    #[arg(long)]
    color_by: Option<String>,
    /// auto, cyclic or sequential.
    #[arg(long)]
    ramp: Option<String>,
}

#[derive(Debug, Args)]
struct DistancesArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// euclidean, mahalanobis, diffusion, ad, common or common-mahalanobis.
    #[arg(long)]
    kind: Option<String>,
    /// 1-based sensor for single-sensor kinds.
    #[arg(long)]
    sensor: Option<String>,
    /// 1-based ordered pair for `ad`, such as `1,2`.
    #[arg(long)]
    pair: Option<String>,
    /// Also check the metric axioms and print the report.
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    fusion: FusionArgs,
}

/// Exit status for an error: 2 configuration, 3 input, 4 numerical.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::InvalidConfig(_) => EXIT_CONFIG,
        Error::DegenerateScale
        | Error::DegenerateDistribution { .. }
        | Error::NumericalFailure { .. } => EXIT_NUMERICAL,
        Error::InvalidInput(_)
        | Error::InvalidSplit(_)
        | Error::Parse { .. }
        | Error::Io(_)
        | Error::Stage { .. } => EXIT_INPUT,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        Error::invalid_config(format!(
            "{THREADS_ENV} must be a positive integer, got {raw:?}"
        ))
    })?;
    // The global pool can only be built once per process; later calls keep the first setting.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Runs the tool on `args` (including the program name) and returns the
/// process exit status.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = configure_threads().and_then(|_| match cli.command {
        Command::GenToy(a) => commands::gen_toy(a),
        Command::Embed(a) => commands::embed(a),
        Command::Eval(a) => commands::eval(a),
        Command::Plot(a) => commands::plot(a),
        Command::Distances(a) => commands::distances(a),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
