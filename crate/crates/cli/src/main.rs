use std::process::ExitCode;

fn main() -> ExitCode {
    hyperlab_cli::run(std::env::args_os())
}
