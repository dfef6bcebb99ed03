//! Command-line front end: `wigneg <command> [options]`.
//!
//! Output is JSON on stdout (with `"schema": 1`) unless `--format csv` is
//! requested for a tabular command. Exit codes: 0 success, 2 usage error,
//! 3 numerical failure.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod parse;
pub mod reproduce;

pub use parse::parse_witness;

/// JSON schema version written to every document.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const UNITS: &str = "Units: dimensionless quadratures x and p with [x, p] = i (hbar = 1). \
Noise variances are in the same units; times are in units of the inverse frequency scale \
chosen by --omega.";

#[derive(Debug, Parser)]
#[command(name = "wigneg", version, about = "Moment-based Wigner negativity witnesses", after_help = UNITS)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads; 0 uses every core. Results do not depend on this value.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// JSON object whose keys are option names, used for options not given on
    /// the command line.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weyl-ordered moments <x^n p^m>_W and radial moments of a state.
    #[command(after_help = UNITS)]
    Moments(MomentsArgs),
    /// Wigner function on a grid or at a point.
    #[command(after_help = UNITS)]
    Wigner(WignerArgs),
    /// Polynomial witnesses <f^2>_W.
    #[command(subcommand, after_help = UNITS)]
    Witness(WitnessCommand),
    /// The power-law regularised wavefunction and its (2xp)^2 moment.
    #[command(after_help = UNITS)]
    Regularized(RegularizedArgs),
    /// Direct noisy readout, deconvolution and witness recovery.
    #[command(after_help = UNITS)]
    Simulate(SimulateArgs),
    /// Continuous position records, Fourier extraction and witness recovery.
    #[command(name = "simulate-record", after_help = UNITS)]
    SimulateRecord(SimulateRecordArgs),
    /// Recomputes every reference value and reports pass/fail per check.
    #[command(name = "reproduce-paper", after_help = UNITS)]
    ReproducePaper(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// State: fock:N, mix:fock:N@P,..., or superpos:N:RE[+iIM],...
    #[arg(long)]
    pub state: String,
    /// Largest total order n + m.
    #[arg(long, default_value_t = 4)]
    pub max_order: usize,
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    #[arg(long)]
    pub state: String,
    /// Single point "x,p" instead of a grid.
    #[arg(long, value_name = "X,P", allow_hyphen_values = true)]
    pub point: Option<String>,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub x1: f64,
    #[arg(long, default_value_t = 101)]
    pub nx: usize,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    pub p0: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub p1: f64,
    #[arg(long, default_value_t = 101)]
    pub np: usize,
}

#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    /// Minimises <(2xp + c0)^2>_W over a Fock lattice.
    #[command(after_help = UNITS)]
    Fb(FbArgs),
    /// Scans the order-two families over c0 and lattices.
    #[command(after_help = UNITS)]
    Scan(ScanArgs),
    /// Closed-form minima for Fock-diagonal states.
    #[command(after_help = UNITS)]
    Rotinv(RotinvArgs),
    /// <x^2 + p^2> against <(x^2 + p^2)^2> for Fock states.
    #[command(after_help = UNITS)]
    Fa(FaArgs),
    /// Evaluates <f^2>_W for a given state and witness.
    #[command(after_help = UNITS)]
    Value(ValueArgs),
}

#[derive(Debug, Args)]
pub struct FbArgs {
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c0: f64,
    #[arg(long, default_value_t = 0)]
    pub offset: usize,
    #[arg(long, default_value_t = 4)]
    pub spacing: usize,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Fock states per lattice.
    #[arg(long, default_value_t = 9)]
    pub levels: usize,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub c0_min: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub c0_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub c0_step: f64,
    /// Rotation angles (radians) applied to both families, comma separated.
    #[arg(long, value_name = "A,B,...", allow_hyphen_values = true)]
    pub angles: Option<String>,
    /// Squeezing factors g in (x, p) -> (g x, p / g), comma separated.
    #[arg(long, value_name = "G,H,...")]
    pub squeezes: Option<String>,
    /// Also minimise over every superposition of at most four lattice states.
    #[arg(long)]
    pub necessity: bool,
}

#[derive(Debug, Args)]
pub struct RotinvArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long, value_enum)]
    pub family: RotinvFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RotinvFamily {
    Fc,
    Fd,
}

#[derive(Debug, Args)]
pub struct FaArgs {
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
}

#[derive(Debug, Args)]
pub struct ValueArgs {
    #[arg(long)]
    pub state: String,
    /// fa:C0, fb:C0, fc:C30,C10, fd:C20,C0, or poly:N,M,C;N,M,C;...
    #[arg(long, allow_hyphen_values = true)]
    pub witness: String,
}

#[derive(Debug, Args)]
pub struct RegularizedArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c0: f64,
    /// Also evaluate W at "x,p".
    #[arg(long, value_name = "X,P", allow_hyphen_values = true)]
    pub wigner: Option<String>,
    /// Also report the norm of the wavefunction.
    #[arg(long)]
    pub check_norm: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub state: String,
    /// Detection-noise variances "sx,sp", each at least 0.5.
    #[arg(long, value_name = "SX,SP")]
    pub noise: String,
    #[arg(long)]
    pub samples: usize,
    /// Required; there is no implicit random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub witness: String,
    /// Write the JSON document here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateRecordArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Averaging time, a whole number of periods 2 pi / omega.
    #[arg(long)]
    pub t0: f64,
    #[arg(long)]
    pub dt: f64,
    /// White-noise spectral density of the position record.
    #[arg(long)]
    pub s0: f64,
    /// Total noise variances "sx,sp" on the extracted quadratures.
    #[arg(long, value_name = "SX,SP")]
    pub noise: String,
    #[arg(long)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub witness: String,
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Seed of the statistical checks.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Samples in the end-to-end deconvolution check.
    #[arg(long, default_value_t = 10_000_000)]
    pub samples: usize,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<wigner_negativity::Error> for CliError {
    fn from(e: wigner_negativity::Error) -> Self {
        use wigner_negativity::Error as E;
        match e {
            E::UnknownOperator(_)
            | E::DimensionMismatch(..)
            | E::Truncation { .. }
            | E::InvalidArgument(_)
            | E::ZeroNorm
            | E::EmptyProjection { .. }
            | E::InvalidDensityMatrix(_)
            | E::ZeroPolynomial
            | E::NotRotationallyInvariant(_)
            | E::NoiseBelowThreshold(_)
            | E::Parse(_)
            | E::Json(_) => Self::Usage(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Output goes to stdout and diagnostics to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// As [`run`], writing to the given streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::inject(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "usage error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| commands::dispatch(&cli)) {
        Ok(outcome) => match outcome.emit(out) {
            Ok(()) => outcome.exit_code,
            Err(e) => {
                let _ = writeln!(err, "{e}");
                e.exit_code()
            }
        },
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}
