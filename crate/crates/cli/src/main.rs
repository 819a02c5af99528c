//! `feigen`: command-line front end.
//!
//! Exit codes: 0 success, 2 configuration, 3 solver, 4 verification,
//! 5 eigensolver. Failures print `{code, message, hint}` as JSON on stderr.

mod args;
mod commands;
mod error;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return;
        }
        Err(e) => {
            let err = error::CliError::Config { message: e.kind().to_string(), hint: Some(e.to_string().trim().to_string()) };
            eprintln!("{}", err.to_json());
            std::process::exit(err.exit_code());
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => commands::cmd_solve(a),
        Command::Spectrum(a) => commands::cmd_spectrum(a),
        Command::Verify(a) => commands::cmd_verify(a),
        Command::Plotdata(a) => commands::cmd_plotdata(a),
    };
    if let Err(err) = outcome {
        eprintln!("{}", err.to_json());
        std::process::exit(err.exit_code());
    }
}
