// SPDX-License-Identifier: MIT OR Apache-2.0

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    match patred_cli::run(patred_cli::Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("patred: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
