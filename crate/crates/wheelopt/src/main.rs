use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(wheelopt::cli::run(std::env::args_os()))
}
