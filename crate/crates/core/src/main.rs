use std::process::ExitCode;

use clap::Parser;
use eetc::cli::{self, Cli, Command, EXIT_OK, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let verbose = matches!(&cli.command, Command::Solve(a) if a.verbose);
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if verbose { "info" } else { "warn" }))
        .init();
    ExitCode::from(cli::run(cli))
}
