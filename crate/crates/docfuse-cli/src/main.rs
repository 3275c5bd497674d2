use clap::{Parser, Subcommand};
use docfuse_cli::commands;
use docfuse_cli::UsageError;

/// Multimodal (text + image) document classification toolkit.
#[derive(Parser)]
#[command(name = "docfuse", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a text, image or fusion classifier.
    Train(commands::train::TrainArgs),
    /// Score checkpoints on a manifest split.
    Eval(commands::eval::EvalArgs),
    /// Classify a single document.
    Predict(commands::predict::PredictArgs),
    /// Measure per-stage inference latency.
    Bench(commands::bench::BenchArgs),
    /// Generate a synthetic multimodal dataset.
    Synth(commands::synth::SynthArgs),
    /// Extract one branch of a fusion checkpoint.
    ExportBranch(commands::export::ExportArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(args) => commands::train::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Predict(args) => commands::predict::run(args),
        Command::Bench(args) => commands::bench::run(args),
        Command::Synth(args) => commands::synth::run(args),
        Command::ExportBranch(args) => commands::export::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        let code = if err.downcast_ref::<UsageError>().is_some() {
            2
        } else {
            1
        };
        std::process::exit(code);
    }
}
