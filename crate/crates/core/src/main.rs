use std::io::Write;
use std::process::ExitCode;

use hyperquot::cli::{main_with, THREADS_ENV};

fn main() -> ExitCode {
    let outcome = main_with(std::env::args_os(), std::env::var(THREADS_ENV).ok());
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.status as u8)
}
