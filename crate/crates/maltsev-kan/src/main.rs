use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use maltsev_kan::cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(err) => {
            let _ = out.flush();
            eprintln!("error: {err:#}");
            exit_code(&err)
        }
    };
    let _ = out.flush();
    ExitCode::from(code)
}
