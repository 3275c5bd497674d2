//! `docfuse predict`: single-document inference printing the predicted
//! label and the per-class probability vector.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use docfuse_core::image::preprocess_image;
use docfuse_core::models::{predict, MultimodalSample};
use docfuse_core::text::{sequence_embed, tokenize_bytes, WordSequence};

use crate::checkpoint::{load_model, LoadedModel};
use crate::pgm::read_raster;
use crate::usage_error;

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Document raster (PGM).
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Extracted document text (UTF-8).
    #[arg(long)]
    pub text: Option<PathBuf>,
    /// Score a fusion model with an all-zero text sequence when the
    /// document has no usable text.
    #[arg(long)]
    pub allow_missing_text: bool,
}

pub fn run(args: &PredictArgs) -> Result<()> {
    let (model, cfg) = load_model(&args.model)?;
    let label_names = cfg.label_names();

    let read_tokens = |path: &PathBuf| -> Result<Vec<String>> {
        let bytes = std::fs::read(path)
            .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
        tokenize_bytes(&bytes).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    };

    let (pred, probs) = match &model {
        LoadedModel::TextCnn(m) => {
            let path = args
                .text
                .as_ref()
                .ok_or_else(|| usage_error("a text model needs --text"))?;
            let tokens = read_tokens(path)?;
            let seq = sequence_embed(&tokens, &m.embedder, m.cfg.max_len)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            predict(m, &seq).map_err(|e| anyhow::anyhow!("{e}"))?
        }
        LoadedModel::TextMlp {
            model: m,
            embedder,
            sif,
        } => {
            let path = args
                .text
                .as_ref()
                .ok_or_else(|| usage_error("a text model needs --text"))?;
            let tokens = read_tokens(path)?;
            let doc = sif.embed(&tokens, embedder).map_err(|e| anyhow::anyhow!("{e}"))?;
            predict(m, &doc).map_err(|e| anyhow::anyhow!("{e}"))?
        }
        LoadedModel::Vision(m) => {
            let path = args
                .image
                .as_ref()
                .ok_or_else(|| usage_error("an image model needs --image"))?;
            let raw = read_raster(path)?;
            let sample = preprocess_image(&raw, m.cfg.input_size)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            predict(m, &sample).map_err(|e| anyhow::anyhow!("{e}"))?
        }
        LoadedModel::Fusion(m) => {
            let image_path = args
                .image
                .as_ref()
                .ok_or_else(|| usage_error("a fusion model needs --image"))?;
            let raw = read_raster(image_path)?;
            let image = preprocess_image(&raw, m.cfg.vision.input_size)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let sequence = match &args.text {
                Some(path) => {
                    let tokens = read_tokens(path)?;
                    sequence_embed(&tokens, &m.text.embedder, m.cfg.text.max_len)
                        .map_err(|e| anyhow::anyhow!("{e}"))?
                }
                None if args.allow_missing_text => {
                    WordSequence::empty(m.cfg.text.embed_dim, m.cfg.text.max_len)
                }
                None => {
                    return Err(usage_error(
                        "a fusion model needs --text; pass --allow-missing-text to score with \
                         an all-zero text sequence",
                    ))
                }
            };
            let sample = MultimodalSample {
                image,
                sequence,
                label: 0,
            };
            predict(m, &sample).map_err(|e| anyhow::anyhow!("{e}"))?
        }
    };

    println!("predicted\t{}", label_names[pred]);
    for (name, p) in label_names.iter().zip(probs.iter()) {
        println!("{name}\t{p:.6}");
    }
    Ok(())
}
