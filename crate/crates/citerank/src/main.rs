use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(citerank::cli::run(std::env::args_os()))
}
