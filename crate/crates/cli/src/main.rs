use clap::Parser;
use std::process::ExitCode;
use toricfib_cli::commands::{emit, execute, Cli};
use toricfib_cli::canonical_json;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|(text, code)| emit(&cli.global, &text).map(|_| code));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprint!("{}", canonical_json(&e.to_json()));
            ExitCode::from(e.exit as u8)
        }
    }
}
