use std::process::ExitCode;

fn main() -> ExitCode {
    enviroclass::cli::main_entry()
}
