use std::process::ExitCode;

fn main() -> ExitCode {
    let code = match latticelab_cli::parse_args(std::env::args_os()) {
        Ok(cmd) => latticelab_cli::run(cmd),
        Err(e) if e.code == 0 => {
            println!("{e}");
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.code
        }
    };
    ExitCode::from(code as u8)
}
