use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Pointwise curvature checks for submanifolds of space forms.
///
/// Every random draw derives from the global seed: the seed is split by a
/// SplitMix64 step into one ChaCha8 stream per trial, start or input record,
/// so results do not depend on thread count or scheduling.
#[derive(Debug, Parser)]
#[command(name = "rigidity", version)]
pub struct Cli {
    /// 64-bit seed for all randomized searches.
    #[arg(long, global = true, env = "RIGIDITY_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Omit wall-clock timing from reports so output is byte-reproducible.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check FundamentalData files against the pinching theorems.
    Check(CheckArgs),
    /// Evaluate, sample or maximize the DDVV commutator ratio.
    Ddvv(DdvvArgs),
    /// Emit the second fundamental form of a model geometry.
    Model(ModelArgs),
    /// Sample a built-in parametric immersion on a grid.
    Immersion(ImmersionArgs),
    /// Print pinching thresholds.
    Pinch(PinchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    YauA,
    Itoh,
    Thm1,
    Thm2,
    Generalized,
}

impl From<TheoremArg> for rigidity_core::Theorem {
    fn from(t: TheoremArg) -> Self {
        use rigidity_core::Theorem;
        match t {
            TheoremArg::YauA => Theorem::YauA,
            TheoremArg::Itoh => Theorem::Itoh,
            TheoremArg::Thm1 => Theorem::Thm1,
            TheoremArg::Thm2 => Theorem::Thm2,
            TheoremArg::Generalized => Theorem::Generalized,
        }
    }
}

/// Inputs hold one FundamentalData object, an array of them, or an array of
/// point samples. Exit status: 0 strict/boundary, 1 fails, 2 indeterminate,
/// 4 malformed JSON, 5 I/O, 6 invalid data or violated hypothesis.
#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    /// Theorem to test (repeatable). Defaults to thm1 for minimal data and
    /// thm2 otherwise.
    #[arg(long = "theorem", value_enum)]
    pub theorems: Vec<TheoremArg>,

    /// Absolute tolerance in curvature units.
    #[arg(long, default_value_t = rigidity_core::pinching::DEFAULT_TOL)]
    pub tol: f64,

    /// Random starts for the sectional-curvature search.
    #[arg(long, default_value_t = rigidity_core::curvature::DEFAULT_KMIN_STARTS)]
    pub starts: usize,

    /// Report file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "mode")]
pub struct DdvvModes {
    /// Max ratio over N P TRIALS random Gaussian tuples.
    #[arg(long, num_args = 3, value_names = ["N", "P", "TRIALS"])]
    pub random: Option<Vec<usize>>,

    /// Multistart ascent on N P STARTS.
    #[arg(long, num_args = 3, value_names = ["N", "P", "STARTS"])]
    pub maximize: Option<Vec<usize>>,

    /// Evaluate a tuple of matrices or a FundamentalData file.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DdvvArgs {
    #[command(flatten)]
    pub mode: DdvvModes,

    /// Iterations per start in maximize mode.
    #[arg(long, default_value_t = rigidity_core::ddvv::DEFAULT_ITERS)]
    pub iters: usize,

    /// Relative tolerance when recovering the extremal structure.
    #[arg(long, default_value_t = 1e-3)]
    pub detect_tol: f64,

    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKindArg {
    TotallyGeodesic,
    ProductOfSpheres,
    Veronese,
    UmbilicalSphere,
    PseudoUmbilicalExtension,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(value_enum)]
    pub kind: ModelKindArg,

    #[arg(long, default_value_t = 2)]
    pub n: usize,

    /// Codimension, padded with zero directions. Defaults to the model's own.
    #[arg(long)]
    pub p: Option<usize>,

    /// Ambient curvature.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,

    /// Mean curvature.
    #[arg(long = "H", default_value_t = 0.0)]
    pub h: f64,

    /// First sphere factor dimension for products.
    #[arg(long, default_value_t = 1)]
    pub k: usize,

    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImmersionArgs {
    /// veronese, clifford, sphere or paraboloid.
    #[arg(long)]
    pub builtin: String,

    /// Nodes per parameter axis.
    #[arg(long, default_value_t = 8)]
    pub grid: usize,

    #[arg(long, default_value_t = rigidity_core::immersion::DEFAULT_STEP)]
    pub step: f64,

    /// Combine steps h and h/2 by Richardson extrapolation.
    #[arg(long)]
    pub richardson: bool,

    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Either a CSV table over (p, n) or a single threshold.
#[derive(Debug, Args)]
pub struct PinchArgs {
    /// Rows p = 1..=PMAX, n = 2..=NMAX. thm2 and generalized_ii are the
    /// coefficients of c + H²; generalized_i is at c = 1.
    #[arg(long, num_args = 2, value_names = ["PMAX", "NMAX"], conflicts_with = "theorem")]
    pub table: Option<Vec<usize>>,

    /// Print exact rationals instead of decimals.
    #[arg(long)]
    pub exact: bool,

    #[arg(long, value_enum, requires = "p")]
    pub theorem: Option<TheoremArg>,

    #[arg(long)]
    pub p: Option<usize>,

    #[arg(long, default_value_t = 2)]
    pub n: usize,

    #[arg(long, default_value_t = 1.0)]
    pub c: f64,

    #[arg(long = "H", default_value_t = 0.0)]
    pub h: f64,

    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
