use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    edl::cli::main_with(edl::cli::Cli::parse())
}
