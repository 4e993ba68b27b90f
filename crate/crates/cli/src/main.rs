mod commands;
mod job;
mod plot;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Exit codes: 0 success, 1 a verification check failed, 2 invalid or
/// numerically unusable input, 3 boundary pattern violation, 4 I/O error.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Pattern(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Invalid(_) => 2,
            Self::Pattern(_) => 3,
            Self::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Invalid(m) | Self::Pattern(m) | Self::Io(m) => m,
        }
    }
}

impl From<isorigid::Error> for CliError {
    fn from(e: isorigid::Error) -> Self {
        match e {
            isorigid::Error::PatternViolation(_) => Self::Pattern(e.to_string()),
            _ => Self::Invalid(e.to_string()),
        }
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("'{s}': {e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Output file, written atomically. Standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format. Defaults to svg for `plot` and json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Root-finding tolerance.
    #[arg(long, global = true, default_value_t = isorigid::DEFAULT_TOL, value_parser = finite)]
    pub tol: f64,
    /// Seed for xoshiro256** (seeded through SplitMix64).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Number of eigenvalues.
    #[arg(long)]
    pub n: usize,
    /// Fixed power sums c_1..c_{n-1}, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = finite)]
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum VerifyMode {
    #[value(name = "Lsign", alias = "lsign")]
    Lsign,
    #[value(name = "assertion")]
    Assertion,
    #[value(name = "gradients")]
    Gradients,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EndArg {
    Lower,
    Upper,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub mode: VerifyMode,
    #[arg(long)]
    pub n: usize,
    /// Fixed power sums (assertion mode only).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = finite)]
    pub c: Vec<f64>,
    /// Random spectra for Lsign/gradients (default 1000), scan points for
    /// assertion (default 50).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Endpoint approached in assertion mode.
    #[arg(long, value_enum, default_value_t = EndArg::Both)]
    pub end: EndArg,
    /// Initial distance from the endpoint in assertion mode.
    #[arg(long, default_value_t = 1e-2, value_parser = finite)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IsoparArgs {
    /// Number of distinct principal curvatures: 1, 2, 3, 4 or 6.
    #[arg(long)]
    pub g: usize,
    #[arg(long, alias = "m")]
    pub m1: usize,
    /// Defaults to m1.
    #[arg(long)]
    pub m2: Option<usize>,
    /// Angles in the grid.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IdentityArgs {
    /// Check a single n instead of 1..=n-max.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    /// Angles per n.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PlotArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Extra values of f to mark, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = finite)]
    pub f: Vec<f64>,
    /// Sample points of F0.
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    /// Companion CSV of the samples. Defaults to the output path with a
    /// `.csv` extension; omitted when writing to standard output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Top power sum p_n.
    #[arg(long, allow_hyphen_values = true, value_parser = finite)]
    pub f: f64,
    /// Band width for the X/Y/Z classification.
    #[arg(long, value_parser = finite)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// F0, feasible interval and boundary spectra.
    Analyze(ModelArgs),
    /// Spectrum at a given top power sum.
    Spectrum(SpectrumArgs),
    /// Outcome of every degenerate multiplicity pattern.
    Degenerate(ModelArgs),
    /// Randomised or boundary checks of the pointwise quantities.
    Verify(VerifyArgs),
    /// Curvature sweep of an isoparametric family.
    Isopar(IsoparArgs),
    /// Cotangent-sum and sine-product identities.
    Identities(IdentityArgs),
    /// SVG of F0 with the level lines of the requested f values.
    Plot(PlotArgs),
    /// Run the job described by a JSON file.
    Job {
        file: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Analyze(_) => "analyze",
            Self::Spectrum(_) => "spectrum",
            Self::Degenerate(_) => "degenerate",
            Self::Verify(_) => "verify",
            Self::Isopar(_) => "isopar",
            Self::Identities(_) => "identities",
            Self::Plot(_) => "plot",
            Self::Job { .. } => "job",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "isorigid", version, about = "Power-sum constrained spectra and isoparametric curvature")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Job { file } => {
            let inner = job::load(&file)?;
            run(inner)
        }
        command => commands::execute(&cli.common, &command),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
