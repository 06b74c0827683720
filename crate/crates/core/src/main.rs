use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = altkit::cli::dispatch(std::env::args_os());
    // Output is fully rendered before anything is written.
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}
