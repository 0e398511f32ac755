//! File formats, run configuration and the `mtq` command-line driver for the
//! microtubule qubit simulator in `mtq-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand as ClapSubcommand, ValueEnum};

pub use commands::{execute, write_outputs, Outputs, Subcommand};
pub use config::{RawConfig, RunConfig};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "mtq", version, about = "Microtubule qubit simulator")]
pub struct Cli {
    /// Flat key=value config file
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Report path; stdout when omitted
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<String>,
    /// json or csv
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Override any config key; may be repeated
    #[arg(short = 's', long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, ClapSubcommand)]
pub enum Command {
    /// Build, evolve and measure a state
    State,
    /// Schmidt analysis of a state across bipartitions
    Entangle {
        /// State file; overrides `state_file`
        state_file: Option<String>,
    },
    /// Dump lattice adjacency and coherent domains
    Lattice {
        /// Pattern file; overrides `pattern_file`
        pattern_file: Option<String>,
    },
    /// Decoherence scan or trajectory ensemble
    Decohere {
        #[arg(value_enum)]
        mode: Option<ModeArg>,
    },
    /// Conditioning Monte Carlo and performance index
    Experiment,
    /// Pion state measured end to end
    DemoEpr,
    /// Engram co-activation recall
    Recall,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Scan,
    Trajectory,
}

impl Cli {
    pub fn subcommand(&self) -> Subcommand {
        match self.command {
            Command::State => Subcommand::State,
            Command::Entangle { .. } => Subcommand::Entangle,
            Command::Lattice { .. } => Subcommand::Lattice,
            Command::Decohere { .. } => Subcommand::Decohere,
            Command::Experiment => Subcommand::Experiment,
            Command::DemoEpr => Subcommand::DemoEpr,
            Command::Recall => Subcommand::Recall,
        }
    }

    /// Config file values overlaid with flags.
    pub fn raw_config(&self) -> CliResult<RawConfig> {
        let mut raw = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::config("config", format!("cannot read {}: {e}", path.display()))
                })?;
                RawConfig::parse(&text)?
            }
            None => RawConfig::default(),
        };
        let mut flags = RawConfig::default();
        for pair in &self.set {
            flags.set_pair(pair)?;
        }
        for (key, value) in [
            ("seed", &self.seed),
            ("out", &self.out),
            ("format", &self.format),
        ] {
            if let Some(v) = value {
                flags.set(key, v)?;
            }
        }
        match &self.command {
            Command::Entangle {
                state_file: Some(p),
            } => flags.set("state_file", p)?,
            Command::Lattice {
                pattern_file: Some(p),
            } => flags.set("pattern_file", p)?,
            Command::Decohere { mode: Some(m) } => flags.set(
                "mode",
                match m {
                    ModeArg::Scan => "scan",
                    ModeArg::Trajectory => "trajectory",
                },
            )?,
            _ => {}
        }
        raw.merge(flags);
        Ok(raw)
    }
}

/// Resolves the config and computes every output without writing anything.
pub fn plan(cli: &Cli) -> CliResult<(RunConfig, Outputs)> {
    let cfg = cli.raw_config()?.resolve()?;
    let outputs = execute(cli.subcommand(), &cfg)?;
    Ok((cfg, outputs))
}

/// Full run: plan, then write. Returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = plan(cli).and_then(|(cfg, outputs)| write_outputs(&outputs, cfg.out.as_deref()));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mtq {}: {e}", cli.subcommand().name());
            e.exit_code()
        }
    }
}
