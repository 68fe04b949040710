use std::process::ExitCode;

fn main() -> ExitCode {
    coconvex::cli::main_with_args(std::env::args_os())
}
