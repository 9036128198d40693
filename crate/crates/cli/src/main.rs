use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cnls_cli::run(std::env::args_os()))
}
