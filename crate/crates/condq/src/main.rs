use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(condq::run(std::env::args()) as u8)
}
