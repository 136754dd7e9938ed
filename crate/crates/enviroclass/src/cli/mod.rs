//! Command-line front end.
//!
//! Subcommands mirror the pipeline stages; global flags select the
//! config file and override its output directory and seed. On failure a
//! single machine-parseable line `error:<category>: <message>` goes to
//! stderr and the process exits nonzero.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod report;
pub mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "enviroclass", version, about = "Environmental health classification from air and water quality data")]
pub struct Cli {
    /// Config file with `key = value` lines (defaults apply when omitted)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory (overrides the config's out_dir)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Random seed (overrides the config's seed)
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and clean both datasets, then join them by state
    Ingest,
    /// Join the datasets and attach overall environment labels
    Label,
    /// Train the stacking ensemble and report test accuracy
    Train,
    /// Rank features by correlation with the label rank
    RankFeatures,
    /// Apply a saved model to a prepared feature CSV
    Predict {
        /// Model file written by `train`
        #[arg(long)]
        model: PathBuf,
        /// Input CSV with `state` and the model's feature columns
        #[arg(long)]
        input: PathBuf,
    },
    /// Generate synthetic source datasets
    Synth {
        /// Number of air observations to generate
        #[arg(long)]
        rows: usize,
    },
    /// Export the index breakpoints, rating table, and label rule table
    DumpTables,
}

/// Loads the config (if any), applies flag overrides, and dispatches.
pub fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }

    match cli.command {
        Command::Ingest => commands::cmd_ingest(&config),
        Command::Label => commands::cmd_label(&config),
        Command::Train => commands::cmd_train(&config),
        Command::RankFeatures => commands::cmd_rank_features(&config),
        Command::Predict { model, input } => {
            commands::cmd_predict(&config.out_dir, &model, &input)
        }
        Command::Synth { rows } => commands::cmd_synth(&config.out_dir, rows, config.seed),
        Command::DumpTables => commands::cmd_dump_tables(&config.out_dir),
    }
}

/// In-process invocation with explicit arguments, for tests.
pub fn run_with_args<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Config(e.to_string()))?;
    run(cli)
}

/// Binary entry point.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error:{}: {}", error.category(), error);
            ExitCode::FAILURE
        }
    }
}
