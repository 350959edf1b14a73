mod cli;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;
use tanglefree::VolumeCache;

use cli::{Cli, Command};
use error::CliError;

fn run(cli: &Cli) -> Result<(), CliError> {
    let (name, out) = match &cli.command {
        Command::Volumes(a) => {
            let cache = match &cli.cache_dir {
                Some(dir) => Some(VolumeCache::open(dir.join("volumes.cache"), a.cap)?),
                None => None,
            };
            ("volumes", commands::volumes(a, cache)?)
        }
        Command::Expansion(a) => ("expansion", commands::expansion(a)?),
        Command::Census(a) => ("census", commands::census(a)?),
        Command::Orbits(a) => ("orbits", commands::orbits(a)?),
        Command::Series(a) => ("series", commands::series(a)?),
        Command::Phi(a) => ("phi", commands::phi(a)?),
        Command::Density(a) => ("density", commands::density(a)?),
        Command::Jkappa(a) => ("jkappa", commands::jkappa(a)?),
        Command::Trace(a) => ("trace", commands::trace(a)?),
        Command::Pipeline(a) => ("pipeline", commands::pipeline_cmd(a)?),
    };
    output::write_all(&cli.out, name, &out)?;
    // artifacts are written either way; a failed property check still exits 5
    match out.failure {
        Some(msg) => Err(CliError::verification(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
