//! Library side of the `tailstat` command-line tool.

pub mod args;
pub mod commands;
pub mod error;
pub mod input;
pub mod output;
pub mod rational;

use std::io::Write;

use clap::Parser;

pub use args::Cli;
pub use commands::{run, Outcome};
pub use error::CliError;

/// Parses `argv`, runs the command and writes the report. Returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let outcome = match cli.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads as usize)
            .build()
            .map_err(|e| CliError::Input(format!("cannot start {threads} worker threads: {e}")))?
            .install(|| run(cli))?,
        None => run(cli)?,
    };
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    match &cli.output {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(outcome.text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Input(format!("cannot write output: {e}")))
        }
    }
}
