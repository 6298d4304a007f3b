use std::process::ExitCode;

fn main() -> ExitCode {
    ptcal::main_with_args(std::env::args_os())
}
