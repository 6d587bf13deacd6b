use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use qadic_core::numbers::{PadicInt, DEFAULT_PRECISION};

use crate::CliError;

pub const DEFAULT_GRID_EXP: i32 = 6;
pub const DEFAULT_WINDOW: i64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "qadic", version, about = "Canonical forms, Wold extensions and duality checks for the 2-adic ring algebra")]
pub struct Cli {
    /// Basis window half-width (matrix, wold) or support half-width (duality); a power of two
    #[arg(short = 'N', long, global = true)]
    pub window: Option<i64>,
    /// Grid exponent g: samples are spaced 2^-g apart
    #[arg(short = 'g', long = "grid-exp", global = true, allow_negative_numbers = true)]
    pub grid_exp: Option<i32>,
    /// Override every pass/fail tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// 2-adic precision in bits
    #[arg(long, global = true, env = "QADIC_DEFAULT_PRECISION")]
    pub precision: Option<u32>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the canonical form of an expression
    Normalize {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Exit 0 when two expressions are equal, 1 otherwise
    Eq {
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
    },
    /// Apply the regular representation to a basis vector
    Apply {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_negative_numbers = true)]
        basis: i64,
    },
    /// Print the conditional expectation onto the diagonal
    Expect {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Write the truncated matrix on the window as sparse CSV
    Matrix {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Build the unitary extending a pair of Cuntz isometries
    Wold {
        #[arg(long, allow_hyphen_values = true)]
        s0: String,
        #[arg(long, allow_hyphen_values = true)]
        s1: String,
    },
    /// Run the duality check over a case file and report residuals
    Duality {
        #[arg(long)]
        cases: PathBuf,
    },
}

/// Validated settings shared by every command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid_exp: i32,
    pub window: i64,
    pub tol: Option<f64>,
    pub precision: u32,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { grid_exp: DEFAULT_GRID_EXP, window: DEFAULT_WINDOW, tol: None, precision: DEFAULT_PRECISION, out: None, format: None }
    }
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let cfg = RunConfig {
            grid_exp: cli.grid_exp.unwrap_or(DEFAULT_GRID_EXP),
            window: cli.window.unwrap_or(DEFAULT_WINDOW),
            tol: cli.tol,
            precision: cli.precision.unwrap_or(DEFAULT_PRECISION),
            out: cli.out.clone(),
            format: cli.format,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(3..=12).contains(&self.grid_exp) {
            return Err(CliError::Usage(format!("grid exponent {} outside [3, 12]", self.grid_exp)));
        }
        if self.window < 1 || self.window.count_ones() != 1 || self.window > 1 << 20 {
            return Err(CliError::Usage(format!("window {} is not a power of two up to 2^20", self.window)));
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Usage(format!("tolerance {t} is not positive")));
            }
        }
        PadicInt::zero(self.precision).map_err(|e| CliError::Usage(format!("precision {}: {e}", self.precision)))?;
        Ok(())
    }
}
