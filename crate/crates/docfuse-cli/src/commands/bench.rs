//! `docfuse bench`: per-stage latency measurement over a manifest.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use crate::bench::{run_bench, BenchOptions};
use crate::checkpoint::load_model;
use crate::manifest::load_manifest;
use crate::report::write_json;

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    /// Timed iterations (after warm-up); at least 10.
    #[arg(long)]
    pub iterations: usize,
    /// Samples pushed through per iteration.
    #[arg(long, default_value_t = 1)]
    pub batch: usize,
    /// Warm-up iterations excluded from the statistics.
    #[arg(long, default_value_t = 3)]
    pub warmup: usize,
    /// Split each stage's batch across threads.
    #[arg(long)]
    pub parallel: bool,
    /// Write the JSON report here (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Free-form hardware description embedded in the report.
    #[arg(long, default_value = "unspecified")]
    pub hardware_note: String,
}

pub fn run(args: &BenchArgs) -> Result<()> {
    let (model, cfg) = load_model(&args.model)?;
    let manifest = load_manifest(&args.manifest)?;
    let opts = BenchOptions {
        iterations: args.iterations,
        batch: args.batch,
        warmup: args.warmup,
        parallel: args.parallel,
        hardware_note: args.hardware_note.clone(),
    };
    let report = run_bench(&model, &cfg, &manifest, &opts)?;
    eprintln!(
        "total mean {:.3} ms/iteration ({:.3} ms/sample), stage sum {:.3} ms",
        report.total.mean_ms, report.per_sample_total_mean_ms, report.stage_mean_sum_ms
    );
    match &args.out {
        Some(path) => {
            write_json(path, &report)?;
            println!("{}", path.display());
        }
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(())
}
