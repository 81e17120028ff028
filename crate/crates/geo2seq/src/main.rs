use std::process::ExitCode;

use clap::Parser;
use geo2seq::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match geo2seq::commands::run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
