//! `docfuse export-branch`: extracts the text or image branch of a fusion
//! checkpoint as a standalone model checkpoint.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use crate::checkpoint::{export_branch, ModelKind};
use crate::usage_error;

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Fusion checkpoint to read.
    #[arg(long)]
    pub model: PathBuf,
    /// Which branch to extract: text or image.
    #[arg(long)]
    pub branch: String,
    /// Output checkpoint path.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &ExportArgs) -> Result<()> {
    let kind = match args.branch.as_str() {
        "text" => ModelKind::TextCnn,
        "image" => ModelKind::Vision,
        other => return Err(usage_error(format!("unknown branch '{other}' (want text|image)"))),
    };
    export_branch(&args.model, kind, &args.out)?;
    println!("{}", args.out.display());
    Ok(())
}
