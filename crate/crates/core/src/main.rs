use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cpcompat::cli::run(std::env::args_os()))
}
