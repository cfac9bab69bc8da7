use std::io::Write;
use std::process::ExitCode;

use besovop_cli::config::Cli;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match besovop_cli::run(&cli) {
        Ok(o) => {
            let _ = std::io::stdout().write_all(o.stdout.as_bytes());
            if o.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("besovop {}: checks failed", cli.command.name());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("besovop: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
