use crate::error::{validation, CliResult};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Subcommand selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Monodromy,
    Planimeter,
    Correspond,
    Zindler,
    Integrals,
    Akns,
    Wegner,
    Rolling,
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Monodromy => "monodromy",
            Command::Planimeter => "planimeter",
            Command::Correspond => "correspond",
            Command::Zindler => "zindler",
            Command::Integrals => "integrals",
            Command::Akns => "akns",
            Command::Wegner => "wegner",
            Command::Rolling => "rolling",
            Command::Selftest => "selftest",
        }
    }
}

/// Table output format.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Samples per period when none are given.
pub const DEFAULT_SAMPLES: usize = 1024;
/// Residual gate when none is given.
pub const DEFAULT_TOL: f64 = 1e-6;
/// ε-sweep for slope fits.
pub const DEFAULT_EPS_SWEEP: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
/// Output directory when neither `--out` nor `BIKEGEO_OUT` is set.
pub const DEFAULT_OUT: &str = "bikegeo-out";

/// Fully resolved invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub curve: Option<String>,
    pub curve_file: Option<PathBuf>,
    pub folds: u32,
    pub ell: Vec<f64>,
    pub eps: Vec<f64>,
    pub lambda: Vec<f64>,
    pub k: Option<u32>,
    pub n: Option<u32>,
    pub samples: usize,
    pub tol: f64,
    pub out: PathBuf,
    pub seed: u64,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            curve: None,
            curve_file: None,
            folds: 1,
            ell: vec![],
            eps: vec![],
            lambda: vec![],
            k: None,
            n: None,
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            out: PathBuf::from(DEFAULT_OUT),
            seed: 0,
            format: Format::Csv,
        }
    }

    /// Checks every numeric field before dispatch.
    pub fn validate(&self) -> CliResult<()> {
        if self.curve.is_some() && self.curve_file.is_some() {
            return validation("--curve and --curve-file are mutually exclusive");
        }
        if self.folds == 0 {
            return validation("--folds must be at least 1");
        }
        for (name, list) in [("--ell", &self.ell), ("--eps", &self.eps)] {
            if let Some(x) = list.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return validation(format!("{name} values must be positive and finite, got {x}"));
            }
        }
        if let Some(x) = self.lambda.iter().find(|x| !x.is_finite()) {
            return validation(format!("--lambda values must be finite, got {x}"));
        }
        if self.samples < 16 {
            return validation("--samples must be at least 16");
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return validation("--tol must be positive and finite");
        }
        if let Some(n) = self.n {
            if n < 2 {
                return validation("--n must be at least 2");
            }
        }
        if let (Some(k), Some(n)) = (self.k, self.n) {
            if k == 0 || k >= n {
                return validation("--k must satisfy 0 < k < n");
            }
            if gcd(k, n) != 1 {
                return validation("--k and --n must be coprime");
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> CliResult<RunConfig> {
        serde_json::from_str(text).map_err(|e| crate::CliError::Validation(format!("malformed config: {e}")))
    }

    /// ε values, defaulting to the slope-fit sweep.
    pub fn eps_or_sweep(&self) -> Vec<f64> {
        if self.eps.is_empty() {
            DEFAULT_EPS_SWEEP.to_vec()
        } else {
            self.eps.clone()
        }
    }
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
