//! `qdarwin`: figure series, averaged partial information curves and
//! redundancy reports as CSV and JSON.

mod args;
mod commands;
mod output;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qdarwin_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(qdarwin_core::Error::InvalidParameter(_)) => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads as usize)
            .build_global()
        {
            eprintln!("qdarwin: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match &cli.command {
        Command::Figure(a) => commands::figure(a),
        Command::Pip(a) => commands::pip(a),
        Command::Redundancy(a) => commands::redundancy(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = if e.exit_code() == 2 {
                "usage error"
            } else {
                "error"
            };
            eprintln!("qdarwin: {kind}: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
