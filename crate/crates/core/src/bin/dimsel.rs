use std::process::ExitCode;

fn main() -> ExitCode {
    let code = dimsel::cli::main_from(std::env::args_os());
    ExitCode::from(code.clamp(0, 255) as u8)
}
