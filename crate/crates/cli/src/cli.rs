use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tanglefree", version, about = "Volumes, tangle-free counting bounds and trace-method checks")]
pub struct Cli {
    /// Directory receiving the tables, reports and manifest.
    #[arg(long, short, global = true, default_value = "tanglefree-out")]
    pub out: PathBuf,

    /// Directory holding the persistent exact volume cache.
    #[arg(long, global = true, env = "TANGLEFREE_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact volume polynomials and the coefficient monotonicity check.
    Volumes(VolumesArgs),
    /// Residual scans of the large-genus expansion and the order-one fit.
    Expansion(ExpansionArgs),
    /// Filling geodesics of a pair of pants against the census of local types.
    Census(CensusArgs),
    /// Splitting types of multicurves, orbit bounds and gluing surjectivity.
    Orbits(OrbitsArgs),
    /// Moment series, tail and probability bounds.
    Series(SeriesArgs),
    /// Realization sums and the rank truncation check.
    Phi(PhiArgs),
    /// Assembled densities and their Friedman-Ramanujan fits.
    Density(DensityArgs),
    /// The torus integral J_kappa in closed form and by direct quadrature.
    Jkappa(JkappaArgs),
    /// Test-function checks: positivity, dilation, annihilation, dual paths.
    Trace(TraceArgs),
    /// Exact exponent bookkeeping of the final bound.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct VolumesArgs {
    #[arg(long, default_value_t = 4)]
    pub gmax: u32,
    #[arg(long, default_value_t = 3)]
    pub nmax: u32,
    /// Largest dimension 3g - 3 + n computed exactly; larger signatures are skipped.
    #[arg(long, default_value_t = 12)]
    pub cap: u32,
}

#[derive(Debug, Args)]
pub struct ExpansionArgs {
    /// Number of boundary components.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 2)]
    pub gmin: u32,
    #[arg(long, default_value_t = 12)]
    pub gmax: u32,
    /// Boundary lengths for the residual scan; each is used on every boundary.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub x: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long, default_value_t = 0.6)]
    pub b1: f64,
    #[arg(long, default_value_t = 0.6)]
    pub b2: f64,
    #[arg(long, default_value_t = 3.0)]
    pub b3: f64,
    #[arg(long, default_value_t = 0.5)]
    pub kappa: f64,
    /// A in L = A log g.
    #[arg(long, default_value_t = 2.0)]
    pub log_factor: f64,
    /// Genus entering L = A log g and R = kappa log g; may be non-integral.
    #[arg(long, default_value_t = 6f64.exp())]
    pub g: f64,
    /// Longest word searched.
    #[arg(long, default_value_t = 12)]
    pub word_cap: usize,
}

#[derive(Debug, Args)]
pub struct OrbitsArgs {
    #[arg(long, default_value_t = 3)]
    pub gmax: u32,
    #[arg(long, default_value_t = 2)]
    pub nmax: u32,
    #[arg(long, default_value_t = 3)]
    pub jmax: usize,
    /// Largest number of complementary pieces Q.
    #[arg(long, default_value_t = 4)]
    pub q_components: usize,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long, default_value_t = 0.1)]
    pub kappa: f64,
    #[arg(long, default_value_t = 5)]
    pub q_components: u32,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Genus for the tail and probability bounds.
    #[arg(long, default_value_t = 1e8)]
    pub g: f64,
    /// Target power N in g^{-N}.
    #[arg(long, default_value_t = 3)]
    pub power: u32,
    /// Universal constant D of the probability bound.
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Filling {
    Cylinder,
    Pants,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[arg(long, value_enum, default_value_t = Filling::Cylinder)]
    pub filling: Filling,
    /// Number of extra cylinders.
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[arg(long, default_value_t = 2)]
    pub q_components: usize,
    #[arg(long, default_value_t = 3)]
    pub gmin: u32,
    #[arg(long, default_value_t = 10)]
    pub gmax: u32,
    /// Boundary lengths of the filled surface; one value is repeated as needed.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub x: Vec<f64>,
    /// Cylinder lengths; one value is repeated as needed.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub y: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Pants word as comma-separated letters, 1 and 2 for the generators and
    /// negatives for inverses.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,-2")]
    pub word: Vec<i8>,
    /// Assemble the once-intersecting torus density instead of a pants word.
    #[arg(long)]
    pub torus: bool,
    #[arg(long, default_value_t = 6)]
    pub g: u32,
    #[arg(long, default_value_t = 0.3)]
    pub kappa: f64,
    #[arg(long, default_value_t = 4.0)]
    pub lmin: f64,
    #[arg(long, default_value_t = 27.0)]
    pub lmax: f64,
    #[arg(long, default_value_t = 24)]
    pub points: usize,
    /// Last index of the short-loop series.
    #[arg(long, default_value_t = 12)]
    pub j_max: usize,
    /// Include the indicator-cut and Dirac corrections.
    #[arg(long)]
    pub corrections: bool,
    /// Degree of the polynomial part in the Friedman-Ramanujan fit.
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
}

#[derive(Debug, Args)]
pub struct JkappaArgs {
    #[arg(long, default_value_t = 0.5)]
    pub kappa: f64,
    #[arg(long, default_value_t = 2.0)]
    pub lmin: f64,
    #[arg(long, default_value_t = 20.0)]
    pub lmax: f64,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    /// Length scale L of h_L.
    #[arg(long, default_value_t = 10.0)]
    pub l: f64,
    /// Power m of the operator 1/4 - d^2.
    #[arg(long, default_value_t = 4)]
    pub m: u32,
    /// Samples of hat h on [-rmax, rmax].
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 50.0)]
    pub rmax: f64,
    /// Epsilon of the spectral lower bound, taken at lambda1 = 2/9 - eps.
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Exact rational, as a decimal or a fraction.
    #[arg(long, default_value = "1/20")]
    pub epsilon: String,
    #[arg(long, default_value = "1/100")]
    pub kappa: String,
    #[arg(long, default_value_t = 4)]
    pub m: u32,
}
