use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Wigner functions from discretized coherent-state path integrals.
///
/// Every run writes its table plus a `<file>.meta.json` sidecar holding the
/// resolved configuration, the version and the wall time. Values given on the
/// command line override those read from `--config`.
#[derive(Debug, Parser)]
#[command(name = "wigner", version)]
pub struct Cli {
    /// Output directory; defaults to $WIGNER_OUT_DIR, then the working directory.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// key=value file with defaults for any long flag (keys are flag names without dashes).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radial profile W(r) along the real axis.
    Profile(ProfileArgs),
    /// Exact, saddle-point and Poisson number-state profiles on a shared grid.
    Figure2(Figure2Args),
    /// Run a self-check suite and emit a JSON report (exit 1 on failure).
    Check(CheckArgs),
    /// Saddle solutions over a grid of |alpha|.
    SaddleTable(SaddleTableArgs),
    /// Monte Carlo sign diagnostics across slice counts.
    McDiag(McDiagArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum State {
    Poisson,
    Number,
    Family,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Spectral,
    Quadrature,
    Mc,
    Saddle,
    Wkb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Raw,
    WkbMatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Oracle,
    Normalization,
    Determinant,
    Sign,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartitionArg {
    Exact,
    Angular,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file, relative to the output directory unless absolute.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long, value_enum)]
    pub state: Option<State>,
    /// Number-state index.
    #[arg(long)]
    pub n: Option<usize>,
    /// Mean occupation of the Poisson state or the family.
    #[arg(long = "N")]
    pub occupation: Option<f64>,
    /// Number of time slices of the family.
    #[arg(long = "L")]
    pub slices: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub rmin: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Quadrature points per angle.
    #[arg(long = "M")]
    pub quad_points: Option<usize>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker cap (0 = all cores); results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Slice count in the saddle-point prefactor.
    #[arg(long = "saddle-L")]
    pub saddle_slices: Option<usize>,
    #[arg(long, value_enum)]
    pub normalization: Option<NormArg>,
    /// Fill region gaps by linear interpolation (labelled in the region column).
    #[arg(long)]
    pub interpolate: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Figure2Args {
    /// Number-state indices, e.g. "1,10".
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Grid end; defaults to sqrt(n + 1/2) + 2 per state.
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long = "saddle-L")]
    pub saddle_slices: Option<usize>,
    #[arg(long)]
    pub interpolate: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub suite: SuiteArg,
    /// Slice counts for the sign suite, e.g. "1..5" or "1,2,4".
    #[arg(long = "L")]
    pub slices: Option<String>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long = "M")]
    pub quad_points: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SaddleTableArgs {
    /// Number-state index fixing r^2 = n + 1/2.
    #[arg(long)]
    pub n: Option<usize>,
    /// Circle radius; overrides --n.
    #[arg(long)]
    pub r: Option<f64>,
    /// Slice count or "inf".
    #[arg(long = "L")]
    pub slices: Option<String>,
    #[arg(long)]
    pub smin: Option<f64>,
    #[arg(long)]
    pub smax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct McDiagArgs {
    #[arg(long = "N")]
    pub occupation: Option<f64>,
    /// Slice counts, e.g. "1..6".
    #[arg(long = "L")]
    pub slices: Option<String>,
    /// Real evaluation point alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long = "batch-size")]
    pub batch_size: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}
