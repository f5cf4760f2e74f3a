mod commands;
mod config;
mod error;
mod output;
mod parse;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use config::{command_from_file, Cli, FileConfig, Resolved};
use error::{usage, CliError};

fn run() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return Err(usage(first.trim_start_matches("error: ")));
        }
    };
    let file = match &cli.common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let command = match cli.command {
        Some(c) => {
            if let Some(name) = &file.command {
                if name != c.name() {
                    return Err(CliError::Config(format!("config is for '{name}' but '{}' was requested", c.name())));
                }
            }
            c
        }
        None => command_from_file(&file)?,
    };
    let cfg = Resolved::new(&cli.common, &file)?;
    commands::run(&command, &file, &cfg)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.exit_code())
        }
    }
}
