//! Command-line grammar and process entry point.

use crate::config::{Command, Format, RunConfig, DEFAULT_OUT, DEFAULT_SAMPLES, DEFAULT_TOL};
use crate::error::CliError;
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "BIKEGEO_OUT";

/// Bicycle-kinematics verification pipelines.
#[derive(Debug, Parser)]
#[command(name = "bikegeo", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

/// Subcommands; every one accepts the shared flags.
#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Integrate the bicycle equation along a front track
    Simulate(Shared),
    /// Classify the monodromy per ℓ and report fixed points, rear length and Berry area
    Monodromy(Shared),
    /// Planimeter area matrix, ε-sweep error slope and hatchet corollary
    Planimeter(Shared),
    /// Bicycle partners, correspondence residuals, Bianchi butterflies and trace conjugacy
    Correspond(Shared),
    /// Zindler rotation numbers and certificates for Γ(k,n)
    Zindler(Shared),
    /// Symbolic Z_n, I_n and filament integrals, optionally evaluated on a curve
    Integrals(Shared),
    /// AKNS Darboux transform with distance law and correspondence residuals
    Akns(Shared),
    /// Wegner buckled rings with Euler-Lagrange residuals and soliton fit
    Wegner(Shared),
    /// Hyperbolic and spherical rolling versus the Lorentz lift
    Rolling(Shared),
    /// Run the acceptance suite
    Selftest(Shared),
}

/// Flags shared by all subcommands.
#[derive(Debug, Args)]
pub struct Shared {
    /// Named curve, e.g. `circle`, `ellipse:a=2,b=1`, `helix:pitch=0.3,turns=3`, `gamma` (uses --k --n)
    #[arg(long, conflicts_with = "curve_file")]
    pub curve: Option<String>,
    /// CSV curve file with header t,x1,..,xn and optional `<file>.json` metadata sidecar
    #[arg(long)]
    pub curve_file: Option<PathBuf>,
    /// Number of times a circle is traversed
    #[arg(long, default_value_t = 1)]
    pub folds: u32,
    /// Bike lengths ℓ, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ell: Vec<f64>,
    /// ε values (step sizes or spectral offsets), comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eps: Vec<f64>,
    /// Spectral parameters λ, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Vec<f64>,
    /// Numerator k of Γ(k,n)
    #[arg(long)]
    pub k: Option<u32>,
    /// Denominator n of Γ(k,n), or the order of the symbolic series
    #[arg(long)]
    pub n: Option<u32>,
    /// Samples per period
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Residual gate for within_tol columns and certificates
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Output directory (default: $BIKEGEO_OUT, else ./bikegeo-out)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for randomized inputs
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Table format
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    pub format: String,
}

impl Cli {
    /// Resolves the parsed arguments into a run configuration.
    pub fn into_config(self, env_out: Option<PathBuf>) -> RunConfig {
        let (command, s) = match self.command {
            Sub::Simulate(s) => (Command::Simulate, s),
            Sub::Monodromy(s) => (Command::Monodromy, s),
            Sub::Planimeter(s) => (Command::Planimeter, s),
            Sub::Correspond(s) => (Command::Correspond, s),
            Sub::Zindler(s) => (Command::Zindler, s),
            Sub::Integrals(s) => (Command::Integrals, s),
            Sub::Akns(s) => (Command::Akns, s),
            Sub::Wegner(s) => (Command::Wegner, s),
            Sub::Rolling(s) => (Command::Rolling, s),
            Sub::Selftest(s) => (Command::Selftest, s),
        };
        RunConfig {
            command,
            curve: s.curve,
            curve_file: s.curve_file,
            folds: s.folds,
            ell: s.ell,
            eps: s.eps,
            lambda: s.lambda,
            k: s.k,
            n: s.n,
            samples: s.samples,
            tol: s.tol,
            out: s.out.or(env_out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            seed: s.seed,
            format: if s.format == "json" { Format::Json } else { Format::Csv },
        }
    }
}

/// Parses argv (including the program name) into a configuration.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_out = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    Ok(Cli::try_parse_from(argv)?.into_config(env_out))
}

/// Runs a full invocation and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_config(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match crate::commands::dispatch(&cfg) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}
