mod commands;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "xitaylor", version, about = "Zeros of Taylor polynomials of the Riemann xi function")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

/// Settings shared by every subcommand. Flags win over XITAYLOR_* variables.
#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    /// Decimal working digits (each command has its own default)
    #[arg(long, global = true, env = "XITAYLOR_DIGITS")]
    pub digits: Option<u32>,
    /// Degree parameter: the polynomial has degree 2n - 2
    #[arg(long, global = true, env = "XITAYLOR_N", default_value_t = 102)]
    pub n: u32,
    /// Radius parameter of the neighbourhoods of ±1
    #[arg(long, global = true, env = "XITAYLOR_DELTA", default_value_t = 0.3)]
    pub delta: f64,
    #[arg(long, global = true, env = "XITAYLOR_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Layout of tabular outputs
    #[arg(long, global = true, env = "XITAYLOR_FORMAT", value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Print outputs instead of writing files
    #[arg(long, global = true)]
    pub stdout: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    /// distance of exp partial-sum zeros to the two limit curves
    Exp,
    /// scaling factor against its Lambert-W approximation
    Lambda,
    /// convergence of one Hurwitz root
    Hurwitz,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scaling factor lambda(n)
    Lambda,
    /// Maclaurin coefficients of xi(1/2 + z)
    Coeffs {
        /// defaults to 2n - 2
        #[arg(long)]
        degree: Option<usize>,
    },
    /// All roots of T(lambda z), classified, with the count report
    Zeros,
    /// Level curve samples
    Curve {
        /// D0, D1, exp-Dinf or exp-D1
        #[arg(long, default_value = "D1")]
        kind: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Count report only
    Count,
    /// Imaginary-axis zeros of the cosh partial sum of degree 200
    Table1,
    /// Hurwitz root errors at n = 102
    Table2,
    /// One quantity over a list of n
    Sweep {
        #[arg(long, value_enum)]
        kind: SweepKind,
        #[arg(long, value_delimiter = ',', default_values_t = [64u32, 128, 256])]
        n_list: Vec<u32>,
        /// zeta zero index for the hurwitz sweep
        #[arg(long, default_value_t = 1)]
        j: usize,
        /// roots with |z - 1| at most this are left out of the exp sweep
        #[arg(long, default_value_t = xitaylor::classical::DEFAULT_EXCLUSION)]
        exclusion: f64,
    },
    /// Scaling solution and representation check for an L-function
    Lfunc {
        /// beta, zeta, or a path to a descriptor JSON file
        #[arg(long, default_value = "beta")]
        descriptor: String,
        /// points re,im at which to compare T with its model
        #[arg(long = "at", value_name = "RE,IM")]
        at: Vec<String>,
    },
    /// SVG of roots and curves
    Plot {
        #[arg(long)]
        roots: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        curves: Vec<PathBuf>,
        #[arg(long, default_value_t = 800)]
        width: u32,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            _ => return fail(CliError::Usage(e.to_string().trim().to_string())),
        },
    };
    let outputs = match commands::execute(&cli.cfg, &cli.cmd) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    match output::emit(&cli.cfg, &outputs) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(CliError::Core(e.into())),
    }
}

fn fail(e: CliError) -> ExitCode {
    let code = e.exit_code();
    let body = serde_json::json!({
        "error": {
            "kind": e.kind(),
            "message": e.to_string(),
            "exit_code": code,
        }
    });
    eprintln!("{body}");
    ExitCode::from(code)
}
