//! Command implementations behind the CLI.

pub mod bench;
pub mod eval;
pub mod export;
pub mod predict;
pub mod synth;
pub mod train;

use std::path::{Path, PathBuf};

use anyhow::Result;

use crate::manifest::{Manifest, Split};
use crate::runconfig::{RunConfig, CONFIG_ENV};
use crate::usage_error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Modality {
    Text,
    Image,
    Fusion,
}

impl Modality {
    pub fn as_str(&self) -> &'static str {
        match self {
            Modality::Text => "text",
            Modality::Image => "image",
            Modality::Fusion => "fusion",
        }
    }
}

/// Resolves the effective configuration: file (flag or `DOCFUSE_CONFIG`),
/// then `--set key=value` overrides, then `--seed`.
pub fn effective_config(
    config_path: Option<&Path>,
    sets: &[String],
    seed: Option<u64>,
) -> Result<RunConfig> {
    let mut cfg = match config_path {
        Some(path) => RunConfig::load(path)?,
        None => match std::env::var_os(CONFIG_ENV) {
            Some(path) => RunConfig::load(&PathBuf::from(path))?,
            None => RunConfig::default(),
        },
    };
    for assignment in sets {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| usage_error(format!("--set '{assignment}': expected key=value")))?;
        cfg.set(key.trim(), value.trim())
            .map_err(|e| usage_error(format!("{e:#}")))?;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Training/validation indices: the `train` split, falling back to the
/// whole corpus when every record is `unsplit`.
pub fn training_indices(manifest: &Manifest) -> Result<(Vec<usize>, Vec<usize>)> {
    let train = manifest.split_indices(Split::Train);
    let val = manifest.split_indices(Split::Val);
    if !train.is_empty() {
        return Ok((train, val));
    }
    let unsplit = manifest.split_indices(Split::Unsplit);
    if unsplit.len() == manifest.records.len() {
        return Ok((unsplit, Vec::new()));
    }
    Err(usage_error(
        "manifest has no train records (and is not fully unsplit)",
    ))
}

pub fn parse_split(s: &str) -> Result<Option<Split>> {
    if s == "all" {
        return Ok(None);
    }
    Split::parse(s)
        .map(Some)
        .ok_or_else(|| usage_error(format!("unknown split '{s}' (want train/val/test/unsplit/all)")))
}

pub fn eval_indices(manifest: &Manifest, split: Option<Split>) -> Result<Vec<usize>> {
    let indices = match split {
        Some(s) => manifest.split_indices(s),
        None => manifest.all_indices(),
    };
    if indices.is_empty() {
        return Err(usage_error(format!(
            "no records in split '{}'",
            split.map(|s| s.as_str()).unwrap_or("all")
        )));
    }
    Ok(indices)
}
