//! Command-line experiment runner: synthesize datasets, split them, train
//! models, evaluate against the pharmacopeial criteria, and chain the whole
//! thing into reproducible pipeline runs.
//!
//! Exit codes are a stable contract:
//! 0 success · 2 usage/config errors · 3 data/artifact errors ·
//! 4 prediction-input errors.

mod commands;
mod manifest;
mod svg;
mod table;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "formbench",
    version,
    about = "Formulation-prediction workbench: representative data splitting, from-scratch regressors, dissolution metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset (CSV + schema JSON, optional manifest)
    Synth(commands::synth::SynthArgs),
    /// Write a train/validation/test split for a dataset
    Split(commands::split::SplitArgs),
    /// Fit models on the training subset and serialize the artifacts
    Train(commands::train::TrainArgs),
    /// Score trained models on every subset and write reports
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Apply a trained model to new formulation rows
    Predict(commands::predict::PredictArgs),
    /// Chain synth → split → train → evaluate under one seed
    Pipeline(commands::pipeline::PipelineArgs),
}

fn exit_code(e: &formbench::Error) -> i32 {
    use formbench::Error;
    match e {
        Error::Argument(_) | Error::Schema(_) => 2,
        Error::UnknownCategory { .. } => 4,
        _ => 3,
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(args) => commands::synth::run(args),
        Command::Split(args) => commands::split::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Predict(args) => commands::predict::run(args),
        Command::Pipeline(args) => commands::pipeline::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
