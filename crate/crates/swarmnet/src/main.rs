use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = swarmnet::cli::Cli::parse();
    match swarmnet::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
