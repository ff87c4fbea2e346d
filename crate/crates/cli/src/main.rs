use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod render;

use commands::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

/// Multiparty quantum channels: CPTP checks, Choi states, PPT and
/// GHZ-diagonal entanglement classification, and the mixing-channel
/// non-additivity reproduction.
#[derive(Debug, Parser)]
#[command(name = "mpcap", version)]
pub struct Cli {
    /// Output format for the report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,

    /// Positivity threshold: eigenvalues ≥ −tolerance count as nonnegative.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Where to write the produced state/channel (choi, mix) or the JSON
    /// report (other commands).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check completeness and complete positivity of a channel file.
    Verify { file: PathBuf },
    /// Compute the Choi state of a channel.
    Choi {
        file: PathBuf,
        /// Party order of the output state, e.g. A1,B,A2,C.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
    },
    /// Classify the entanglement of a state file.
    Classify {
        file: PathBuf,
        /// Player groups for the pairwise table, e.g. A1+A2,B,C.
        /// Defaults to one group per party.
        #[arg(long)]
        groups: Option<String>,
    },
    /// Mix channels with the given probabilities (uniform by default).
    Mix {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        weights: Option<Vec<f64>>,
    },
    /// Run the bundled reproduction suite.
    Reproduce {
        /// Comma-separated claim ids to keep.
        #[arg(long, value_delimiter = ',')]
        claims: Option<Vec<String>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo: Vec<String> = std::env::args().skip(1).collect();
    match commands::run(&cli, echo).and_then(|outcome| commands::emit(&cli, outcome)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CliError::EXIT_CODE)
        }
    }
}
