use std::process::ExitCode;

use clap::Parser;
use twostep_cli::{execute, write_output, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli).and_then(|out| write_output(&out).map(|_| out.exit_code())) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
