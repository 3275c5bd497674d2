//! `docfuse eval`: scores one or two checkpoints on a manifest split and
//! writes a JSON report. With two single-modality checkpoints the report
//! also carries the oracle upper bound (a sample counts when either model
//! gets it right).

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use docfuse_core::metrics::{evaluate, oracle_fusion};
use docfuse_core::models::predict_all;

use crate::checkpoint::{load_model, LoadedModel};
use crate::commands::{eval_indices, parse_split};
use crate::dataset::{load_images, load_multimodals, load_sequences, load_tokens};
use crate::manifest::{load_manifest, Manifest};
use crate::report::{confusion_csv, eval_report_json, model_eval_json, write_json};
use crate::runconfig::RunConfig;
use crate::usage_error;

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Checkpoint(s) to score; pass twice for an oracle comparison.
    #[arg(long, required = true)]
    pub model: Vec<PathBuf>,
    #[arg(long)]
    pub manifest: PathBuf,
    /// train, val, test, unsplit or all.
    #[arg(long, default_value = "test")]
    pub split: String,
    /// Output report path (JSON).
    #[arg(long)]
    pub report: PathBuf,
    /// Also export the first model's confusion matrix as CSV.
    #[arg(long)]
    pub confusion_csv: Option<PathBuf>,
}

/// Predictions of a loaded model over manifest rows.
pub fn predictions(
    model: &LoadedModel,
    cfg: &RunConfig,
    manifest: &Manifest,
    indices: &[usize],
) -> Result<Vec<usize>> {
    let image_size = cfg.effective_image_size();
    let preds = match model {
        LoadedModel::TextCnn(m) => {
            let samples = load_sequences(manifest, indices, &m.embedder, m.cfg.max_len)?;
            predict_all(m, &samples).map_err(|e| anyhow::anyhow!("{e}"))?
        }
        LoadedModel::TextMlp {
            model: m,
            embedder,
            sif,
        } => {
            let mut samples = Vec::with_capacity(indices.len());
            for &i in indices {
                let tokens = load_tokens(manifest, i)?;
                samples.push(sif.embed(&tokens, embedder).map_err(|e| anyhow::anyhow!("{e}"))?);
            }
            predict_all(m, &samples).map_err(|e| anyhow::anyhow!("{e}"))?
        }
        LoadedModel::Vision(m) => {
            let samples = load_images(manifest, indices, image_size)?;
            predict_all(m, &samples).map_err(|e| anyhow::anyhow!("{e}"))?
        }
        LoadedModel::Fusion(m) => {
            let samples = load_multimodals(
                manifest,
                indices,
                &m.text.embedder,
                m.cfg.text.max_len,
                image_size,
            )?;
            predict_all(m, &samples).map_err(|e| anyhow::anyhow!("{e}"))?
        }
    };
    Ok(preds)
}

pub fn run(args: &EvalArgs) -> Result<()> {
    if args.model.is_empty() || args.model.len() > 2 {
        return Err(usage_error("--model takes one or two checkpoints"));
    }
    let manifest = load_manifest(&args.manifest)?;
    let split = parse_split(&args.split)?;
    let indices = eval_indices(&manifest, split)?;
    let labels = manifest.labels_of(&indices);
    let k = manifest.label_names.len();

    let mut model_jsons = Vec::new();
    let mut all_preds = Vec::new();
    let mut first_cfg: Option<RunConfig> = None;
    for path in &args.model {
        let (model, cfg) = load_model(path)?;
        if cfg.label_names() != manifest.label_names {
            bail!(
                "label sets differ: checkpoint {} has {:?}, manifest has {:?}",
                path.display(),
                cfg.label_names(),
                manifest.label_names
            );
        }
        let preds = predictions(&model, &cfg, &manifest, &indices)?;
        let report = evaluate(&preds, &labels, k).map_err(|e| anyhow::anyhow!("{e}"))?;
        eprintln!(
            "{}: OA {:.4}  macro-F1 {:.4}  ({} samples)",
            path.display(),
            report.overall_accuracy,
            report.macro_f1,
            report.n_samples
        );
        if model_jsons.is_empty() {
            if let Some(csv_path) = &args.confusion_csv {
                std::fs::write(csv_path, confusion_csv(&manifest.label_names, &report.confusion))?;
            }
        }
        model_jsons.push(model_eval_json(
            &path.display().to_string(),
            model.kind().as_str(),
            &manifest.label_names,
            &report,
        ));
        all_preds.push(preds);
        first_cfg.get_or_insert(cfg);
    }

    let oracle = if all_preds.len() == 2 {
        let oa = oracle_fusion(&all_preds[0], &all_preds[1], &labels)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        eprintln!("oracle: OA {oa:.4}");
        Some(oa)
    } else {
        None
    };

    let json = eval_report_json(
        &first_cfg.unwrap(),
        &args.split,
        &manifest.label_names,
        model_jsons,
        oracle,
    );
    write_json(&args.report, &json)?;
    println!("{}", args.report.display());
    Ok(())
}
