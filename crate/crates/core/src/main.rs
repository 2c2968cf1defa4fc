use std::io::Write;
use std::process::ExitCode;

use obstacle_scattering::cli::{run_args, EXIT_INPUT, EXIT_OK};

fn main() -> ExitCode {
    let outcome = run_args(std::env::args());
    let code = match (&outcome.out, outcome.exit_code) {
        (Some(path), EXIT_OK | 3) => match std::fs::write(path, &outcome.text) {
            Ok(()) => outcome.exit_code,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                EXIT_INPUT
            }
        },
        (_, EXIT_OK | 3) => {
            let _ = std::io::stdout().write_all(outcome.text.as_bytes());
            outcome.exit_code
        }
        _ => {
            eprint!("{}", outcome.text);
            outcome.exit_code
        }
    };
    ExitCode::from(code as u8)
}
