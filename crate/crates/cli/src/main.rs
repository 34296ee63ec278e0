use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::FileConfig;

/// Deformed-oscillator tomograms, entropic inequalities, entanglement and uncertainty bounds.
#[derive(Parser, Debug)]
#[command(name = "ftomo", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Output file (or directory for `figure all`)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Truncation tolerance on the dropped probability mass
    #[arg(long, global = true)]
    pub eps: Option<f64>,

    /// Append normalization/positivity audit results to the output
    #[arg(long, global = true)]
    pub audit: bool,

    /// Largest audit deviation still reported as a pass
    #[arg(long, global = true)]
    pub audit_tol: Option<f64>,

    /// Worker threads for grid evaluation
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// JSON file with default values for any flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tomogram of a one-mode state on a grid
    Tomogram(TomogramArgs),
    /// Curve data of one figure (1..5) or `all`
    Figure(FigureArgs),
    /// Sweep of the Laguerre-polynomial entropic inequalities
    Entropy(EntropyArgs),
    /// Linear entropy of two-mode Kerr coherent states or their cat superpositions versus λ
    Entanglement(EntanglementArgs),
    /// Schrödinger-Robertson statistics of deformed quadratures versus λ
    Uncertainty(UncertaintyArgs),
    /// Run the self-verification checks and write a JSON report
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct StateArgs {
    /// vacuum, fock:N or coherent
    #[arg(long)]
    pub state: Option<String>,

    /// Coherent amplitude, `re` or `re,im`
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,

    /// identity, kerr:λ, qosc:λ or a JSON object
    #[arg(long)]
    pub deformation: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct TomogramArgs {
    /// optical, symplectic, photon or husimi
    #[arg(long)]
    pub kind: Option<String>,

    #[command(flatten)]
    pub state: StateArgs,

    /// X axis as min:max:step
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,

    /// Number of θ points on [0, 2π)
    #[arg(long)]
    pub theta_count: Option<usize>,

    /// Comma-separated μ values
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,

    /// Comma-separated ν values
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,

    /// Re α axis as min:max:step
    #[arg(long, allow_hyphen_values = true)]
    pub re: Option<String>,

    /// Im α axis as min:max:step
    #[arg(long, allow_hyphen_values = true)]
    pub im: Option<String>,

    /// Largest photon number on the photon axis
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct FigureArgs {
    /// 1..5 or all
    pub id: Option<String>,

    /// λ axis as min:max:step (a λ = 0 row is always added)
    #[arg(long)]
    pub lambda: Option<String>,

    /// |α|² axis of figure 1
    #[arg(long)]
    pub x: Option<String>,

    /// |α₁| axis of figure 3
    #[arg(long)]
    pub alpha1: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct EntropyArgs {
    /// Comma-separated Fock indices
    #[arg(long)]
    pub n: Option<String>,

    /// x = |α|² axis as min:max:step
    #[arg(long)]
    pub x: Option<String>,

    /// Comma-separated block sizes
    #[arg(long)]
    pub s: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct EntanglementArgs {
    /// λ axis as min:max:step; λ = 0 uses the closed-form limit
    #[arg(long)]
    pub lambda: Option<String>,

    /// |α₁| of the two-mode state
    #[arg(long)]
    pub alpha1: Option<String>,

    /// |α₂| of the two-mode state
    #[arg(long)]
    pub alpha2: Option<f64>,

    /// even or odd: use the cat superposition with amplitude --alpha1
    #[arg(long)]
    pub cat: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct UncertaintyArgs {
    #[command(flatten)]
    pub state: StateArgs,

    /// Deformation of the quadratures: qosc, kerr or identity
    #[arg(long)]
    pub family: Option<String>,

    /// λ axis as min:max:step
    #[arg(long)]
    pub lambda: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct VerifyArgs {
    /// Run only the named check (repeatable)
    #[arg(long)]
    pub only: Vec<String>,

    /// Use the printed +1/12 constant in the moment check
    #[arg(long)]
    pub force_paper_moment_constant: bool,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(ftomo::Error),
    Io(String),
    AuditFailed(String),
    ChecksFailed,
}

impl From<ftomo::Error> for CliError {
    fn from(e: ftomo::Error) -> Self {
        match e {
            ftomo::Error::InvalidArgument(m) | ftomo::Error::InvalidDeformation(m) => CliError::Config(m),
            other => CliError::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    if let Some(n) = cli.common.threads.or(file.threads) {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let common = commands::Resolved::new(&cli.common, &file)?;
    match cli.command {
        Command::Tomogram(a) => commands::tomogram(&common, &a, &file),
        Command::Figure(a) => commands::figure(&common, &a, &file),
        Command::Entropy(a) => commands::entropy(&common, &a, &file),
        Command::Entanglement(a) => commands::entanglement(&common, &a, &file),
        Command::Uncertainty(a) => commands::uncertainty(&common, &a, &file),
        Command::Verify(a) => commands::verify(&common, &a, &file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(m)) => {
            eprintln!("ftomo: config error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Io(m)) => {
            eprintln!("ftomo: i/o error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(e)) => {
            eprintln!("ftomo: numerical error: {e}");
            ExitCode::from(3)
        }
        Err(CliError::AuditFailed(m)) => {
            eprintln!("ftomo: audit failed: {m}");
            ExitCode::from(3)
        }
        Err(CliError::ChecksFailed) => {
            eprintln!("ftomo: verification failed");
            ExitCode::from(1)
        }
    }
}
