mod artifact;
mod commands;
mod selftest;

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use annulus_chromatic::config::Guards;
use annulus_chromatic::Error;

use commands::Command;

/// Boundary chromatic polynomials on annulus strips: exact polynomials,
/// zeros, sector free energies, predicted transition loci and limiting
/// curves.
#[derive(Parser, Debug)]
#[command(name = "annulus-chromatic", version)]
struct Cli {
    /// Worker threads for grid and scan tasks (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Lift the width guards on exact and sector computations.
    #[arg(long, global = true)]
    unsafe_sizes: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub const GUARD: u8 = 2;
    pub const CONFIG: u8 = 3;

    pub fn config(msg: impl Into<String>) -> Self {
        CliError { code: Self::CONFIG, msg: msg.into() }
    }

    pub fn failed(msg: impl Into<String>) -> Self {
        CliError { code: 1, msg: msg.into() }
    }

    pub fn internal(e: impl fmt::Display) -> Self {
        CliError { code: 1, msg: e.to_string() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError { code: 1, msg: format!("{}: {e}", path.display()) }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SizeGuard(_) => Self::GUARD,
            Error::InvalidSpec(_)
            | Error::InvalidGraph(_)
            | Error::UnknownFixture(_)
            | Error::SectorOutOfRange { .. }
            | Error::Parse(_) => Self::CONFIG,
            _ => 1,
        };
        CliError { code, msg: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(CliError::CONFIG),
            };
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(CliError::CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let guards = if cli.unsafe_sizes { Guards::unchecked() } else { Guards::default() };
    match commands::run(&cli.command, guards, cli.unsafe_sizes) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
