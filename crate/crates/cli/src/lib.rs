//! Command-line front end: configuration, experiment commands and CSV output.

pub mod commands;
pub mod config;
pub mod format;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{parse_config, render_config, ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "twostep", version, about = "Two-step valuation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Evaluate a single correlation instead of the configured grid.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rho: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best estimate over the correlation grid.
    Table2,
    /// Best estimate, SCR and cost-of-capital value over the grid.
    Coc,
    /// Run the property suites.
    Verify {
        #[arg(long, hide = true)]
        inject_negative_beta: bool,
    },
    /// Closed-form example tables.
    Examples,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] twostep::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}

#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub destination: Option<PathBuf>,
    pub verification_failed: bool,
}

impl Output {
    pub fn exit_code(&self) -> u8 {
        u8::from(self.verification_failed)
    }
}

pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        None => RunConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            parse_config(&text)?
        }
    };
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    if let Some(rho) = cli.rho {
        cfg.rho_grid = vec![rho];
    }
    if let Some(out) = &cli.out {
        cfg.output_path = Some(out.display().to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let cfg = load_config(cli)?;
    let (text, verification_failed) = match cli.command {
        Command::Table2 => (commands::table2(&cfg)?, false),
        Command::Coc => (commands::coc(&cfg)?, false),
        Command::Verify { inject_negative_beta } => {
            let r = commands::verify(&cfg, inject_negative_beta);
            (r.text, !r.passed)
        }
        Command::Examples => (commands::examples()?, false),
    };
    Ok(Output {
        text,
        destination: cfg.output_path.map(PathBuf::from),
        verification_failed,
    })
}

pub fn write_output(out: &Output) -> Result<(), CliError> {
    match &out.destination {
        Some(path) => std::fs::write(path, &out.text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(out.text.as_bytes())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
