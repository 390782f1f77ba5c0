// SPDX-License-Identifier: Apache-2.0

//! `hopcov`: summarize datasets, extract fingerprints, evaluate the random
//! forest protocol and compare classifiers.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 3 when a numerical
//! routine fails (for example eigensolver non-convergence).

mod artifact;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hopcov",
    version,
    about = "Multi-hop assortativity graph fingerprints"
)]
pub struct Cli {
    /// Worker threads for extraction and training (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print dataset statistics.
    Summarize {
        #[command(flatten)]
        input: InputArgs,
        /// Print the summary as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compute the fingerprint of every graph and write a feature CSV.
    Extract {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        features: FeatureArgs,
        /// Output CSV (default: `<name>_features.csv` in the output directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the repeated stratified evaluation protocol.
    Evaluate {
        /// Feature CSV produced by `extract`.
        #[arg(long = "features-csv", conflicts_with_all = ["dir", "file"])]
        features_csv: Option<PathBuf>,
        #[command(flatten)]
        input: OptionalInputArgs,
        #[command(flatten)]
        features: FeatureArgs,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        /// Training fraction of the outer split.
        #[arg(long, default_value_t = 0.9)]
        split: f64,
        /// Candidate forest sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "128,256,512")]
        trees: Vec<usize>,
        /// Report JSON (default: `<name>_evaluation.json` in the output directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Friedman test and Nemenyi critical difference over an accuracy table.
    Compare {
        /// CSV: header of algorithm names, one row per dataset.
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Convention::Demsar)]
        convention: Convention,
        /// Restrict to these algorithms (default: every column without missing cells).
        #[arg(long, value_delimiter = ',')]
        algorithms: Option<Vec<String>>,
        /// Result JSON (default: `<table stem>_comparison.json` in the output directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the significance diagram here (plus a `.json` companion).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Tu,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Demsar,
    Paper,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InputSource {
    /// Directory holding `<NAME>_A.txt` and friends.
    #[arg(long)]
    pub dir: Option<PathBuf>,
    /// JSON dataset file.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[command(flatten)]
    pub source: InputSource,
    /// Input format (default: `tu` for `--dir`, `json` for `--file`).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Dataset name (default: the directory or file stem).
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct OptionalInputArgs {
    #[arg(long)]
    pub dir: Option<PathBuf>,
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct FeatureArgs {
    /// Named per-dataset configuration (e.g. `mutag`, `collab`).
    #[arg(long)]
    pub preset: Option<String>,
    /// Feature items to include, comma separated (1–7).
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<u8>>,
    /// Number of dominant eigenvectors.
    #[arg(long)]
    pub eigenvectors: Option<usize>,
    /// Largest hop count.
    #[arg(long)]
    pub hops: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

/// 3 when a numerical routine failed anywhere in the chain, otherwise 2.
fn exit_code(e: &anyhow::Error) -> u8 {
    let numerical = e
        .chain()
        .filter_map(|c| c.downcast_ref::<hopcov_core::Error>())
        .any(hopcov_core::Error::is_numerical);
    if numerical {
        3
    } else {
        2
    }
}
