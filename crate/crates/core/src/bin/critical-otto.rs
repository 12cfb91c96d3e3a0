use std::process::ExitCode;

fn main() -> ExitCode {
    let status = critical_otto::cli::run(std::env::args_os());
    ExitCode::from(u8::try_from(status).unwrap_or(1))
}
