use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(semieff::cli::run(std::env::args_os()))
}
