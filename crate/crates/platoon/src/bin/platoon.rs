use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(platoon::cli::run(std::env::args_os()))
}
