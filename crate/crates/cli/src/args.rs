use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "crat", version, about = "Rational approximation, quadrature and lightning Laplace experiments")]
pub struct Cli {
    /// Directory for CSV and gnuplot output.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Evaluate the experiment's acceptance checks; exit 1 if any fails.
    #[arg(long, global = true)]
    pub check: bool,

    /// Largest n for sweeps (each command has its own default).
    #[arg(long, global = true)]
    pub nmax: Option<usize>,

    /// Write CSV only, no gnuplot scripts.
    #[arg(long, global = true)]
    pub csv_only: bool,

    /// Smallest n included in rate fits.
    #[arg(long, global = true, default_value_t = crat_core::rate::DEFAULT_MIN_N)]
    pub min_n: usize,

    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximations of sqrt(x) on [0, 1].
    #[command(subcommand)]
    Approx(ApproxCmd),
    /// Pole and node distance diagnostics.
    #[command(subcommand)]
    Cluster(ClusterCmd),
    /// Potential-theory diagnostics.
    #[command(subcommand)]
    Potential(PotentialCmd),
    /// Tanh and tanh-sinh quadrature.
    #[command(subcommand)]
    Quad(QuadCmd),
    /// Laplace problems on polygons.
    #[command(subcommand)]
    Lightning(LightningCmd),
    /// Error curves of the Newman, trapezoidal, Stenger, least-squares and Lawson families.
    Fig1,
    /// Lightning solve on the 12-corner star with log|z| data.
    Fig4,
    /// Distance curves of clustered poles and quadrature nodes.
    Fig6,
    /// |phi| along [0, 1] and [-1, 0] for a tapered minimax configuration.
    Fig10,
    /// Uniform against tapered poles for linear minimax approximation of sqrt(x).
    Fig12,
    /// Quadrature errors and node distances for tanh and tanh-sinh.
    Fig13,
    /// |phi - r| over [-2, -1] and its 1-norm.
    Fig14,
    /// Replay an experiment manifest (TOML).
    Run {
        #[arg(long)]
        manifest: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Newman,
    Trap,
    Stenger,
    Ls,
    Lawson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Xi {
    Classic,
    Improved,
}

#[derive(Debug, Subcommand)]
pub enum ApproxCmd {
    /// (n, sup error) for n = 1..nmax.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, value_enum, default_value = "classic")]
        xi: Xi,
    },
    /// Lawson fits with uniform and tapered poles, even n up to nmax (default 50).
    Fig12,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceKind {
    Uniform,
    Tapered,
    Lightning,
    Tanh,
    TanhSinh,
}

#[derive(Debug, Subcommand)]
pub enum ClusterCmd {
    /// (k, d_k, sqrt k, log d_k) for a pole set or the half-rule node distances.
    Dump {
        #[arg(long, value_enum)]
        kind: DistanceKind,
        #[arg(long, default_value_t = 40)]
        n: usize,
        /// Spacing (uniform) or taper constant (tapered, lightning).
        #[arg(long)]
        sigma: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PoleKind {
    Uniform,
    Tapered,
}

#[derive(Debug, Subcommand)]
pub enum PotentialCmd {
    /// log10 |phi| on [0, 1] and on [-1, 0] for a Lawson fit's nodes and poles.
    PhiCurves {
        #[arg(long, value_enum, default_value = "tapered")]
        kind: PoleKind,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Exact and bilinear strip potentials.
    Strip {
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
        log_eps: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuadKind {
    Tanh,
    TanhSinh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Integrand {
    /// sqrt(1 + x)
    Sqrt1px,
    /// exp(x)
    Exp,
}

#[derive(Debug, Subcommand)]
pub enum QuadCmd {
    /// (n, |I_n - I|) for n = 1..nmax (default 40).
    Sweep {
        #[arg(long, value_enum)]
        kind: QuadKind,
        #[arg(long, value_enum, default_value = "sqrt1px")]
        integrand: Integrand,
    },
    /// Nodes, weights and endpoint distances.
    Nodes {
        #[arg(long, value_enum)]
        kind: QuadKind,
        #[arg(long, default_value_t = 40)]
        n: usize,
    },
    /// |phi - r| over [-2, -1], its 1-norm and the contour identity for exp(t).
    Gtm {
        #[arg(long, value_enum)]
        kind: QuadKind,
        #[arg(long, default_value_t = 40)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Data {
    /// log|z - z0| with z0 from --z0.
    Logabs,
    /// Re(z^2).
    Rez2,
    /// One value per vertex from --data-file, linear along edges.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    L,
    Snowflake,
}

#[derive(Debug, Subcommand)]
pub enum LightningCmd {
    /// Adaptive solve, doubling the poles per corner until the target residual.
    Solve(SolveArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Polygon vertices, one `x,y` per line, counterclockwise.
    #[arg(long, required_unless_present = "shape", conflicts_with = "shape")]
    pub polygon: Option<PathBuf>,
    /// Built-in polygon instead of --polygon.
    #[arg(long, value_enum)]
    pub shape: Option<Shape>,
    #[arg(long, value_enum, default_value = "logabs")]
    pub data: Data,
    /// Vertex values for `--data file`.
    #[arg(long, required_if_eq("data", "file"))]
    pub data_file: Option<PathBuf>,
    /// Singularity of the logabs data, `x,y`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub z0: String,
    #[arg(long, default_value_t = 1e-6)]
    pub target: f64,
    #[arg(long, default_value_t = 4)]
    pub start: usize,
    #[arg(long, default_value_t = 4000)]
    pub max_dof: usize,
    /// Interior grid resolution per axis.
    #[arg(long, default_value_t = 80)]
    pub grid: usize,
}
