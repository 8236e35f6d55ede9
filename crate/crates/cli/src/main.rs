use std::process::ExitCode;

use chermnykh_cli::{configure_threads, run, Cli, THREADS_ENV};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var(THREADS_ENV).ok();
    let result = configure_threads(threads.as_deref())
        .and_then(|()| run(&cli, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chermnykh: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
