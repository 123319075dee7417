use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = semistab::cli::run(std::env::args_os());
    std::io::stdout().write_all(outcome.stdout.as_bytes()).ok();
    if !outcome.stderr.is_empty() {
        eprintln!("{}", outcome.stderr.trim_end());
    }
    ExitCode::from(outcome.code as u8)
}
