use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(stiefelbench::cli::run(std::env::args_os()))
}
