//! Command-line front end for `tenpca-core`.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod options;
pub mod verify;

pub use args::Cli;
pub use error::{exit, CliError, CliResult};

use args::Command;
use config::Config;

pub fn run(cli: &Cli) -> CliResult<()> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Basis(a) => commands::basis(a, &config),
        Command::Pca(a) => commands::pca(a, &config),
        Command::Verify(a) => verify::run(a, &config),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Info(a) => commands::info(a),
    }
}
