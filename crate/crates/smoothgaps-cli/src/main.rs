//! smoothgaps: command-line surface over the core library.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 capacity exceeded,
//! 3 construction failed. Errors go to stderr as JSON records.

use clap::error::ErrorKind;
use clap::Parser;
use smoothgaps_cli::{commands, config, output};

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match config::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            output::emit_error("usage", &e.to_string());
            return 1;
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            output::emit_error(e.kind(), &e.message());
            e.exit_code()
        }
    }
}
