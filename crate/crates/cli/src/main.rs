use std::process::ExitCode;

fn main() -> ExitCode {
    nbdf_cli::main_with(std::env::args_os())
}
