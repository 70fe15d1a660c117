use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hbvm",
    version,
    about = "Hamiltonian Boundary Value Methods HBVM(k,s)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the nodes, weights, basis tables and Runge-Kutta form of HBVM(k,s).
    Tableau(TableauArgs),
    /// Integrate a built-in problem and write trajectory, drift and manifest files.
    Integrate(IntegrateArgs),
    /// Measure the observed order by repeated step halving.
    Convergence(ConvergenceArgs),
    /// Bisect for the boundary of the quintic center's period annulus.
    Annulus(AnnulusArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemId {
    Harmonic,
    Sitnikov,
    HenonHeiles,
    Quintic,
}

impl ProblemId {
    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Harmonic => "harmonic",
            ProblemId::Sitnikov => "sitnikov",
            ProblemId::HenonHeiles => "henon-heiles",
            ProblemId::Quintic => "quintic",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-14)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-14)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    /// Degree of the polynomial path (block size of the stage system).
    #[arg(long)]
    pub s: usize,
    /// Number of Gauss nodes, k >= s.
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Clone, Args)]
pub struct TableauArgs {
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct InitialArgs {
    /// Comma-separated initial state `q1,..,qm,p1,..,pm`. For henon-heiles three
    /// values `q1,q2,p1` may be given and `p2 >= 0` is solved from --energy.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y0: Option<Vec<f64>>,
    /// Target energy for the henon-heiles initial state.
    #[arg(long, default_value_t = 0.99 / 6.0)]
    pub energy: f64,
}

#[derive(Debug, Clone, Args)]
pub struct IntegrateArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemId,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long)]
    pub h: f64,
    #[arg(long)]
    pub steps: usize,
    #[command(flatten)]
    pub initial: InitialArgs,
    /// Invariants to monitor (default: all the problem provides).
    #[arg(long, value_delimiter = ',')]
    pub drift: Option<Vec<String>>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemId,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long)]
    pub h0: f64,
    /// Number of step sizes h0, h0/2, ..., at least 2.
    #[arg(long)]
    pub levels: usize,
    #[arg(long)]
    pub t_end: f64,
    #[command(flatten)]
    pub initial: InitialArgs,
    /// Also write convergence.csv and manifest.json here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AnnulusArgs {
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long)]
    pub h: f64,
    #[arg(long, default_value_t = 2500)]
    pub steps: usize,
    /// Bisection stops once the bracket is shorter than this.
    #[arg(long, default_value_t = f64::EPSILON)]
    pub tol: f64,
    /// Max-norm distance from the origin that counts as escaping.
    #[arg(long, default_value_t = 2.0)]
    pub escape_radius: f64,
    #[arg(long, default_value_t = 1)]
    pub check_every: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write annulus.csv (or .json) and manifest.json here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}
