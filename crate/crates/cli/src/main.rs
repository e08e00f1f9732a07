//! `tikhreg` command-line runner. Exit status: 0 on success, 2 on usage
//! errors (nothing written), 1 on runtime errors.

mod cli;
mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};
use serde_json::json;

use cli::Cli;
use commands::Failure;

const USAGE: u8 = 2;
const RUNTIME: u8 = 1;

fn parse(argv: &[OsString]) -> Result<Cli, ExitCode> {
    let root = Cli::command();
    let report = |e: clap::Error| {
        let _ = e.print();
        if e.use_stderr() {
            ExitCode::from(USAGE)
        } else {
            ExitCode::SUCCESS
        }
    };
    let matches = root.clone().try_get_matches_from(argv).map_err(report)?;
    let cli = Cli::from_arg_matches(&matches).map_err(report)?;
    let Some(path) = cli.config.clone() else {
        return Ok(cli);
    };
    let merged = config::merge(argv, &root, &matches, &path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(USAGE)
    })?;
    let matches = root.try_get_matches_from(merged).map_err(report)?;
    Cli::from_arg_matches(&matches).map_err(report)
}

fn run(cli: Cli) -> ExitCode {
    if let Err(Failure::Usage(msg)) = commands::check_paths(&cli.command) {
        eprintln!("error: {msg}");
        return ExitCode::from(USAGE);
    }
    let name = cli.command.name();
    let dir = output::resolve_dir(cli.command.out_dir(), name);
    let manifest = json!({
        "tool": "tikhreg",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "threads": cli.threads,
        "config": cli.config,
        "parameters": serde_json::to_value(&cli.command).unwrap_or_default()[name],
        "resolved": {},
    });
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.into()).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {} worker threads: {e}", cli.threads);
            return ExitCode::from(RUNTIME);
        }
    };
    match pool.install(|| commands::dispatch(&cli.command, output::Output::new(dir), manifest)) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(RUNTIME)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    match parse(&argv) {
        Ok(cli) => run(cli),
        Err(code) => code,
    }
}
