//! `docfuse synth`: materializes a synthetic multimodal dataset.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use crate::synth::{generate_synthetic, PatternKind, SynthConfig, SynthMode};
use crate::usage_error;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Number of samples.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Comma-separated class keywords.
    #[arg(long, default_value = "zephyr,quartz")]
    pub keywords: String,
    /// Comma-separated visual patterns (stripes, blobs, checker).
    #[arg(long, default_value = "stripes,blobs")]
    pub patterns: String,
    /// joint: label = keyword x pattern; aligned: keyword i = pattern i.
    #[arg(long, default_value = "joint")]
    pub mode: String,
    #[arg(long, default_value_t = 32)]
    pub image_size: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    /// Probability of perturbing a token's spelling.
    #[arg(long, default_value_t = 0.05)]
    pub misspell: f64,
    /// Pixel noise standard deviation (fraction of full scale).
    #[arg(long, default_value_t = 0.04)]
    pub noise: f64,
    /// Document length range, e.g. 30:60.
    #[arg(long, default_value = "30:60")]
    pub doc_len: String,
    /// How many times the keyword is planted per document.
    #[arg(long, default_value_t = 3)]
    pub keyword_repeats: usize,
}

pub fn config_from_args(args: &SynthArgs) -> Result<SynthConfig> {
    let keywords: Vec<String> = args
        .keywords
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    let patterns: Vec<PatternKind> = args
        .patterns
        .split(',')
        .map(|s| {
            PatternKind::parse(s.trim())
                .ok_or_else(|| usage_error(format!("unknown pattern '{s}'")))
        })
        .collect::<Result<_>>()?;
    let mode = match args.mode.as_str() {
        "joint" => SynthMode::Joint,
        "aligned" => SynthMode::Aligned,
        other => return Err(usage_error(format!("unknown mode '{other}'"))),
    };
    let (lo, hi) = args
        .doc_len
        .split_once(':')
        .ok_or_else(|| usage_error("--doc-len wants LO:HI"))?;
    let cfg = SynthConfig {
        num_samples: args.n,
        keywords,
        patterns,
        mode,
        image_size: args.image_size,
        doc_len: (lo.parse()?, hi.parse()?),
        keyword_repeats: args.keyword_repeats,
        misspell_prob: args.misspell,
        pixel_noise: args.noise,
        train_fraction: args.train_fraction,
        seed: args.seed,
    };
    cfg.validate().map_err(|e| usage_error(format!("{e:#}")))?;
    Ok(cfg)
}

pub fn run(args: &SynthArgs) -> Result<()> {
    let cfg = config_from_args(args)?;
    let manifest = generate_synthetic(&cfg, &args.out)?;
    eprintln!(
        "{} samples, {} classes, {} train / {} test",
        manifest.records.len(),
        manifest.label_names.len(),
        manifest.split_indices(crate::manifest::Split::Train).len(),
        manifest.split_indices(crate::manifest::Split::Test).len(),
    );
    println!("{}", args.out.join("manifest.csv").display());
    Ok(())
}
