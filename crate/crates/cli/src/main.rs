//! `cmx` — command-line interface to the code-mixed text toolkit.
//!
//! Each subcommand wraps exactly one library operation. Exit codes:
//! 0 success, 1 usage error, 2 data/validation error, 3 I/O error.
//! Outputs are written atomically (temp file + rename); stdout carries
//! only data tables, stderr only diagnostics.

mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use cmx_core::Error;

use commands::Cli;

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Usage(_) => 1,
        Error::Data(_) | Error::Parse { .. } | Error::Record { .. } => 2,
        Error::Io(_) => 3,
    }
}

fn init_thread_pool() -> Result<(), Error> {
    let Ok(raw) = std::env::var("CMX_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::usage(format!("CMX_THREADS must be a number, got `{raw}`")))?;
    // 0 = auto
    cmx_core::build_thread_pool(threads)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    if let Err(err) = init_thread_pool().and_then(|()| commands::run(cli)) {
        eprintln!("error: {err}");
        return ExitCode::from(exit_code_for(&err));
    }
    ExitCode::SUCCESS
}
