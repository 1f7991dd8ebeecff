use std::process::ExitCode;

use clap::Parser;
use covert_tvd::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap picks 0 for --help/--version and 2 for usage errors
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("covert-tvd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
