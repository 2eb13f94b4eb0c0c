use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(polarad::cli::run(std::env::args_os()))
}
