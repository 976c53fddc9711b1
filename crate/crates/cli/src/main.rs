use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(infobound_cli::run(std::env::args_os()))
}
