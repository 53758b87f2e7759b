use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = radbkg_cli::Cli::parse();
    let stdout = std::io::stdout();
    match radbkg_cli::run(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("radbkg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
