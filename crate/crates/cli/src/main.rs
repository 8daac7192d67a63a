//! Command-line front end: vocabulary intersection, analogy evaluation,
//! static vector extraction and tagging-probe sweeps.

mod chart;
mod cmd;
mod error;
mod manifest;
mod output;
mod settings;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cmd::analogy::AnalogyArgs;
use cmd::extract::ExtractCmd;
use cmd::probe::SweepArgs;
use cmd::vocab::IntersectArgs;

#[derive(Debug, Parser)]
#[command(name = "embedprobe", version, about = "Evaluate static word embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Vocabulary utilities.
    #[command(subcommand)]
    Vocab(VocabCmd),
    /// Word analogy benchmark.
    #[command(subcommand)]
    Analogy(AnalogyCmd),
    /// Static vectors from a contextual dump.
    #[command(subcommand)]
    Extract(ExtractCmd),
    /// Frozen-embedding tagging probe.
    #[command(subcommand)]
    Probe(ProbeCmd),
}

#[derive(Debug, Subcommand)]
enum VocabCmd {
    /// Words present in every input, in the order of the first.
    Intersect(IntersectArgs),
}

#[derive(Debug, Subcommand)]
enum AnalogyCmd {
    /// Accuracy and MRR per category.
    Eval(AnalogyArgs),
}

#[derive(Debug, Subcommand)]
enum ProbeCmd {
    /// Train one probe per hidden size and report test accuracy.
    Sweep(SweepArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Vocab(VocabCmd::Intersect(a)) => cmd::vocab::intersect(a),
        Command::Analogy(AnalogyCmd::Eval(a)) => cmd::analogy::eval(a),
        Command::Extract(c) => cmd::extract::run(c),
        Command::Probe(ProbeCmd::Sweep(a)) => cmd::probe::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
