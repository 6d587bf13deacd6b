//! Command-line front end for `qadic-core`.
//!
//! Exit codes: 0 success or equal, 1 not equal or a failed check, 2 usage
//! or parse error, 3 a violated mathematical precondition.

pub mod commands;
pub mod config;
pub mod parser;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use serde_json::json;
use thiserror::Error;

pub use config::{Cli, Command, Format, RunConfig};
pub use parser::{parse_element, parse_expr, Expr, ParseError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse {input:?}: {error}")]
    Parse { input: String, error: ParseError },
    #[error("{0}")]
    Precondition(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            CliError::Precondition(_) | CliError::Io(_) => 3,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Precondition(_) => "precondition",
            CliError::Io(_) => "io",
        };
        let mut v = json!({"error": {"kind": kind, "message": self.to_string()}});
        if let CliError::Parse { error, .. } = self {
            v["error"]["offset"] = json!(error.offset);
            v["error"]["expected"] = json!(error.expected);
        }
        v
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    let output = commands::dispatch(&cli.command, &cfg)?;
    let rendered = output.render(cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => std::io::stdout().write_all(rendered.as_bytes())?,
    }
    Ok(output.status)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(status) => status,
        Err(err) => {
            if cli.format == Some(Format::Json) {
                eprintln!("{}", err.to_json());
            } else {
                eprintln!("error: {err}");
            }
            err.exit_code()
        }
    }
}
