use std::process::ExitCode;

use clap::Parser;
use urnchain::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let hint = matches!(e, urnchain::cli::CliError::Model(urnchain::Error::ResourceCap { .. }));
            if hint {
                eprintln!("hint: rerun with --mode mc");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
