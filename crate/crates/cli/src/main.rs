mod args;
mod commands;
mod io;

use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

/// Attaches the offending flag to a library error.
pub(crate) trait FlagContext<T> {
    fn flag(self, name: &str) -> Result<T>;
}

impl<T> FlagContext<T> for heterovar::Result<T> {
    fn flag(self, name: &str) -> Result<T> {
        self.map_err(|e| anyhow::Error::new(e).context(format!("--{name}")))
    }
}

const THREADS_VAR: &str = "HETEROVAR_THREADS";

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| anyhow!("{THREADS_VAR}: expected a nonnegative integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| anyhow!("{THREADS_VAR}: {e}"))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Estimate(a) => commands::estimate(a),
        Command::Cv(a) => commands::cv(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Rates(a) => commands::rates(a),
        Command::Theory(t) => commands::theory(t),
        Command::Kernel(a) => commands::kernel(a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numeric = err
        .chain()
        .filter_map(|e| e.downcast_ref::<heterovar::Error>())
        .any(heterovar::Error::is_numeric);
    if numeric {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
