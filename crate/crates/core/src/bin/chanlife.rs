use std::process::ExitCode;

fn main() -> ExitCode {
    chanlife::cli::run_from_env()
}
