use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "rotframe",
    version,
    about = "Rotating-frame metrics, stable surfaces, wave residuals and size spectra"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Unset flags fall back to `--config`,
/// then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Speed of light.
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Pass/fail tolerance; each command documents its meaning.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON file with any of `seed`, `c`, `tol`, `out`, `format`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Obj,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Composition property suite.
    Props(PropsArgs),
    /// Instantaneous or time-averaged metric at a point.
    Metric(MetricArgs),
    /// Stable-surface mesh or radius samples.
    Surface(SurfaceArgs),
    /// Finite-difference residual of a boosted wave.
    Residual(ResidualArgs),
    /// Bessel-zero size spectrum.
    Quantify(QuantifyArgs),
    /// External-cancellation scan of two line sources.
    Twosource(TwoSourceArgs),
}

#[derive(Debug, Args)]
pub struct PropsArgs {
    /// Check one expression instead of the built-in suite.
    #[arg(long)]
    pub expr: Option<String>,
    /// Random times per expression.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long)]
    pub expr: String,
    /// `x,y,z`
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub time: f64,
    /// Time-average instead of evaluating at `--time`.
    #[arg(long)]
    pub average: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SurfaceKindArg {
    Cylinder,
    Ellipsoid,
    Numeric,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long, value_enum, default_value_t = SurfaceKindArg::Ellipsoid)]
    pub kind: SurfaceKindArg,
    /// `ω` for a cylinder, `ω₁,ω₂,ω₃` for an ellipsoid.
    #[arg(long, default_value = "1,1,1")]
    pub omega: String,
    /// Rotation whose averaged `dt²` zero set is sampled (numeric kind).
    #[arg(long)]
    pub expr: Option<String>,
    /// Ray search limit (numeric kind).
    #[arg(long, default_value_t = 10.0)]
    pub r_max: f64,
    /// `n_phi,n_z` for cylinders, `n_theta,n_phi` otherwise.
    #[arg(long, default_value = "32,16")]
    pub resolution: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Equation {
    Schrodinger,
    Kleingordon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Constant,
    Gaussian,
    Plane,
    Exp,
    Spherical,
    Breathing,
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[arg(value_enum)]
    pub equation: Equation,
    #[arg(long, value_enum, default_value_t = ProfileArg::Gaussian)]
    pub profile: ProfileArg,
    #[arg(long, default_value_t = 5.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Gaussian width.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Wavenumber of plane, spherical and breathing profiles.
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    /// Difference step.
    #[arg(long, default_value_t = 0.02)]
    pub h: f64,
    /// Half-width of the sample cube.
    #[arg(long, default_value_t = 1.0)]
    pub extent: f64,
    /// Samples per axis.
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    /// 3 or 5 point stencils.
    #[arg(long, default_value_t = 3)]
    pub stencil: u8,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tau: f64,
    /// Negative selects `exp(−iΩτ)`.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub sign: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Even,
    Odd,
}

#[derive(Debug, Args)]
pub struct QuantifyArgs {
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    #[arg(long, value_enum, default_value_t = ParityArg::Even)]
    pub parity: ParityArg,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 5)]
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WaveProfileArg {
    Sin,
    Triangle,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignsArg {
    Same,
    Opposite,
}

#[derive(Debug, Args)]
pub struct TwoSourceArgs {
    #[arg(long, value_enum, default_value_t = WaveProfileArg::Sin)]
    pub profile: WaveProfileArg,
    #[arg(long, value_enum, default_value_t = SignsArg::Same)]
    pub signs: SignsArg,
    /// Grid points `a_j = 4πj/n`.
    #[arg(long, default_value_t = 400)]
    pub points: usize,
}
