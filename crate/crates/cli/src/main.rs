mod commands;
mod context;
mod convergence;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vertexkit::cache::CACHE_ENV;
use vertexkit::extrapolate::Extrapolation;

/// Exit status for a check whose residual exceeds its tolerance.
pub const EXIT_VIOLATION: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "vertexkit", version, about = "Comma three-string vertex matrices and their verification")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Truncation order; `convergence` takes a comma-separated list.
    #[arg(long = "N", visible_alias = "n", global = true, value_delimiter = ',', default_value = "256")]
    pub n: Vec<usize>,
    /// Summands in the finest partial sum of every infinite sum.
    #[arg(long, global = true, default_value_t = 2048)]
    pub sum_order: usize,
    /// Tail extrapolation: none or richardsonK.
    #[arg(long, global = true, default_value = "richardson1")]
    pub extrapolation: Extrapolation,
    /// Interior window for residuals.
    #[arg(long, global = true, default_value_t = 16)]
    pub window: usize,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Threshold override, repeatable.
    #[arg(long = "tolerance", value_name = "KEY=VAL", global = true)]
    pub tolerance: Vec<String>,
    /// Mode table cache directory.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache_dir: Option<PathBuf>,
}

impl Common {
    /// The single order required by every command except `convergence`.
    pub fn order(&self) -> anyhow::Result<usize> {
        match self.n.as_slice() {
            [n] => Ok(*n),
            _ => anyhow::bail!("this command takes a single --N"),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Taylor modes of ((1+x)/(1-x))^(q/p).
    Modes {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        q: u32,
        /// Highest mode index.
        #[arg(long)]
        length: usize,
    },
    /// Coupling matrices and basis maps.
    Matrices {
        #[arg(long, value_enum, default_value_t = commands::MatrixKind::M1)]
        which: commands::MatrixKind,
    },
    /// Inverse of beta*M1^T + alpha*M2^T.
    Inverse {
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["k", "strings"])]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        beta: f64,
        /// String-count parameterization: alpha = cos(k*pi/strings), beta = 1.
        #[arg(long, requires = "strings")]
        k: Option<u32>,
        #[arg(long, requires = "k")]
        strings: Option<u32>,
    },
    /// The coupling matrix F.
    Fmatrix,
    /// Neumann blocks, G blocks or the ghost insertion.
    Vertex {
        #[arg(long, value_enum, default_value_t = commands::VertexPart::Neumann)]
        part: commands::VertexPart,
    },
    /// Runs a verification suite; exits 2 when a check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = verify::Suite::All)]
        suite: verify::Suite,
        /// F matrix JSON to verify instead of a fresh assembly.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Shift one seeded random entry of F before checking.
        #[arg(long, value_name = "SEED")]
        perturb: Option<u64>,
    },
    /// Residuals across truncation orders; exits 2 unless they strictly decrease.
    Convergence {
        #[arg(long, value_enum)]
        identity: convergence::Identity,
    },
    /// Mode table cache management.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug)]
enum CacheAction {
    List,
    Clear,
    /// Stores both tables of exponent 1/p and 1-1/p.
    Prewarm {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long)]
        length: usize,
    },
}

/// Outcome of a command that ran to completion.
pub enum Outcome {
    Pass,
    Violation,
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let c = &cli.common;
    match cli.command {
        Command::Modes { p, q, length } => commands::modes(c, p, q, length),
        Command::Matrices { which } => commands::matrices(c, which),
        Command::Inverse { alpha, beta, k, strings } => commands::inverse(c, alpha, beta, k.zip(strings)),
        Command::Fmatrix => commands::fmatrix(c),
        Command::Vertex { part } => commands::vertex(c, part),
        Command::Verify { suite, input, perturb } => verify::run(c, suite, input.as_deref(), perturb),
        Command::Convergence { identity } => convergence::run(c, identity),
        Command::Cache { action } => match action {
            CacheAction::List => commands::cache_list(c),
            CacheAction::Clear => commands::cache_clear(c),
            CacheAction::Prewarm { p, length } => commands::cache_prewarm(c, p, length),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(EXIT_VIOLATION),
        Err(e) => {
            eprintln!("error: {e:#}");
            if context::is_violation(&e) {
                ExitCode::from(EXIT_VIOLATION)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
