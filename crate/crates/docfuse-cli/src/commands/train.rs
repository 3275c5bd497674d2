//! `docfuse train`: trains one modality on a manifest and writes a
//! checkpoint plus a JSONL epoch history. `--protocol tobacco-kfold` runs
//! stratified resampling rounds and aggregates their test scores.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use docfuse_core::metrics::evaluate;
use docfuse_core::models::{
    train_classifier, EpochStats, FusionModel, TextCnnModel, TextMlpModel, TrainHyper,
    VisionModel,
};
use docfuse_core::rng::Rng;

use crate::checkpoint::{
    apply_state_subset, build_embedder, load_model, read_checkpoint, save_model, LoadedModel,
    ModelKind,
};
use crate::commands::{effective_config, training_indices, Modality};
use crate::dataset::{
    fit_and_embed_documents, load_images, load_multimodals, load_sequences,
};
use crate::history::write_history;
use crate::manifest::{kfold_splits, load_manifest, Manifest, Split};
use crate::report::{eval_report_json, model_eval_json, write_json, ModelEvalJson};
use crate::runconfig::{FusionInit, RunConfig, TextModelKind};
use crate::usage_error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Protocol {
    /// Use the manifest's split column as-is.
    Fixed,
    /// Stratified resampling rounds: draw a train set, test on the rest.
    TobaccoKfold,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset manifest CSV.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Which model to train.
    #[arg(long, value_enum)]
    pub modality: Modality,
    /// Output directory for checkpoint, history and reports.
    #[arg(long)]
    pub out: PathBuf,
    /// Flat key=value config file (defaults to $DOCFUSE_CONFIG if set).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Config overrides, e.g. --set train.epochs=20 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
    #[arg(long, value_enum, default_value = "fixed")]
    pub protocol: Protocol,
    /// Resampling rounds for --protocol tobacco-kfold.
    #[arg(long, default_value_t = 3)]
    pub runs: usize,
    /// Training-set size for --protocol tobacco-kfold.
    #[arg(long, default_value_t = 800)]
    pub train_size: usize,
}

pub fn run(args: &TrainArgs) -> Result<()> {
    let mut cfg = effective_config(args.config.as_deref(), &args.sets, args.seed)?;
    let manifest = load_manifest(&args.manifest)?;
    cfg.set_label_names(&manifest.label_names);
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;

    match args.protocol {
        Protocol::Fixed => {
            let (train_idx, val_idx) = training_indices(&manifest)?;
            let outcome = train_once(&cfg, &manifest, args.modality, &train_idx, &val_idx)?;
            let ckpt_path = args.out.join("model.ckpt");
            save_model(&ckpt_path, &outcome.model, &cfg)?;
            write_history(&args.out.join("history.jsonl"), &outcome.history)?;
            report_progress(&outcome.history);
            println!("{}", ckpt_path.display());
        }
        Protocol::TobaccoKfold => {
            run_kfold(&cfg, &manifest, args)?;
        }
    }
    Ok(())
}

fn report_progress(history: &[EpochStats]) {
    for stats in history {
        match stats.val_acc {
            Some(v) => eprintln!(
                "epoch {:>4}  loss {:.4}  train_acc {:.4}  val_acc {:.4}",
                stats.epoch, stats.loss, stats.train_acc, v
            ),
            None => eprintln!(
                "epoch {:>4}  loss {:.4}  train_acc {:.4}",
                stats.epoch, stats.loss, stats.train_acc
            ),
        }
    }
}

pub struct TrainOutcome {
    pub model: LoadedModel,
    pub history: Vec<EpochStats>,
}

/// Trains one model on explicit index sets. Library entry point shared by
/// the fixed and kfold protocols (and the acceptance suite).
pub fn train_once(
    cfg: &RunConfig,
    manifest: &Manifest,
    modality: Modality,
    train_idx: &[usize],
    val_idx: &[usize],
) -> Result<TrainOutcome> {
    let hyper = TrainHyper {
        learning_rate: cfg.train_lr,
        momentum: cfg.train_momentum,
        batch_size: cfg.train_batch,
        epochs: cfg.epochs_for(modality.as_str()),
    };
    let mut rng = Rng::from_seed(cfg.seed);
    let labels = manifest.labels_of(train_idx);
    let val_labels = manifest.labels_of(val_idx);
    let image_size = cfg.effective_image_size();

    match modality {
        Modality::Text => match cfg.text_model {
            TextModelKind::Cnn => {
                let embedder = build_embedder(cfg)?;
                let mut model = TextCnnModel::new(cfg.text_cnn_config(), embedder, &mut rng)
                    .map_err(|e| anyhow::anyhow!("{e}"))?;
                let train = load_sequences(manifest, train_idx, &model.embedder, cfg.text_max_len)?;
                let val = load_sequences(manifest, val_idx, &model.embedder, cfg.text_max_len)?;
                let val_ref = (!val.is_empty()).then_some((val.as_slice(), val_labels.as_slice()));
                let history =
                    train_classifier(&mut model, &train, &labels, val_ref, &hyper, &mut rng)
                        .map_err(|e| anyhow::anyhow!("{e}"))?;
                Ok(TrainOutcome {
                    model: LoadedModel::TextCnn(model),
                    history,
                })
            }
            TextModelKind::Mlp => {
                let embedder = build_embedder(cfg)?;
                let (sif, train, mut others) = fit_and_embed_documents(
                    manifest,
                    train_idx,
                    &[val_idx],
                    &embedder,
                    cfg.sif_a,
                )?;
                let val = others.pop().unwrap();
                let mut model = TextMlpModel::new(cfg.text_mlp_config(), &mut rng)
                    .map_err(|e| anyhow::anyhow!("{e}"))?;
                let val_ref = (!val.is_empty()).then_some((val.as_slice(), val_labels.as_slice()));
                let history =
                    train_classifier(&mut model, &train, &labels, val_ref, &hyper, &mut rng)
                        .map_err(|e| anyhow::anyhow!("{e}"))?;
                Ok(TrainOutcome {
                    model: LoadedModel::TextMlp {
                        model,
                        embedder,
                        sif,
                    },
                    history,
                })
            }
        },
        Modality::Image => {
            let mut model = VisionModel::new(cfg.vision_config()?, &mut rng)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let train = load_images(manifest, train_idx, image_size)?;
            let val = load_images(manifest, val_idx, image_size)?;
            let val_ref = (!val.is_empty()).then_some((val.as_slice(), val_labels.as_slice()));
            let history = train_classifier(&mut model, &train, &labels, val_ref, &hyper, &mut rng)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            Ok(TrainOutcome {
                model: LoadedModel::Vision(model),
                history,
            })
        }
        Modality::Fusion => {
            let embedder = build_embedder(cfg)?;
            let mut model = FusionModel::new(cfg.fusion_config()?, embedder, &mut rng)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            if cfg.fusion_init == FusionInit::Branches {
                init_from_branches(cfg, &mut model)?;
            }
            let train =
                load_multimodals(manifest, train_idx, &model.text.embedder, cfg.text_max_len, image_size)?;
            let val =
                load_multimodals(manifest, val_idx, &model.text.embedder, cfg.text_max_len, image_size)?;
            let val_ref = (!val.is_empty()).then_some((val.as_slice(), val_labels.as_slice()));
            let history = train_classifier(&mut model, &train, &labels, val_ref, &hyper, &mut rng)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            Ok(TrainOutcome {
                model: LoadedModel::Fusion(model),
                history,
            })
        }
    }
}

/// Copies pretrained branch checkpoints into a fresh fusion model.
fn init_from_branches(cfg: &RunConfig, model: &mut FusionModel) -> Result<()> {
    if cfg.fusion_text_branch.is_empty() || cfg.fusion_vision_branch.is_empty() {
        return Err(usage_error(
            "fusion.init = branches needs fusion.text_branch and fusion.vision_branch paths",
        ));
    }
    for (path, want, prefix) in [
        (&cfg.fusion_text_branch, ModelKind::TextCnn, "text."),
        (&cfg.fusion_vision_branch, ModelKind::Vision, "vision."),
    ] {
        let ckpt = read_checkpoint(Path::new(path))?;
        if ckpt.kind != want {
            anyhow::bail!("{path} is a {} checkpoint, wanted {}", ckpt.kind.as_str(), want.as_str());
        }
        let remapped: Vec<(String, docfuse_core::Tensor)> = ckpt
            .tensors
            .into_iter()
            .map(|(n, t)| (format!("{prefix}{n}"), t))
            .collect();
        let mut targets = Vec::new();
        model.state_mut(&mut targets);
        apply_state_subset(targets, &remapped).with_context(|| format!("applying {path}"))?;
    }
    Ok(())
}

fn run_kfold(cfg: &RunConfig, manifest: &Manifest, args: &TrainArgs) -> Result<()> {
    let mut split_rng = Rng::from_seed(cfg.seed ^ 0xf01d);
    let splits = kfold_splits(manifest, args.train_size, args.runs, &mut split_rng)?;
    let label_names = manifest.label_names.clone();
    let k = label_names.len();
    let mut oas = Vec::new();
    let mut macro_f1s = Vec::new();
    let mut per_class_sums = vec![0.0; k];
    for (run, (train_idx, test_idx)) in splits.iter().enumerate() {
        let mut run_cfg = cfg.clone();
        run_cfg.seed = cfg.seed.wrapping_add(run as u64);
        eprintln!(
            "run {run}: {} train / {} test documents",
            train_idx.len(),
            test_idx.len()
        );
        let outcome = train_once(&run_cfg, manifest, args.modality, train_idx, &[])?;
        let run_dir = args.out.join(format!("run{run}"));
        std::fs::create_dir_all(&run_dir)?;
        let ckpt_path = run_dir.join("model.ckpt");
        save_model(&ckpt_path, &outcome.model, &run_cfg)?;
        write_history(&run_dir.join("history.jsonl"), &outcome.history)?;

        let (loaded, _) = load_model(&ckpt_path)?;
        let preds = super::eval::predictions(&loaded, &run_cfg, manifest, test_idx)?;
        let test_labels = manifest.labels_of(test_idx);
        let report = evaluate(&preds, &test_labels, k).map_err(|e| anyhow::anyhow!("{e}"))?;
        oas.push(report.overall_accuracy);
        macro_f1s.push(report.macro_f1);
        for (c, f1) in report.per_class_f1.iter().enumerate() {
            per_class_sums[c] += f1;
        }
        let json: ModelEvalJson = model_eval_json(
            &ckpt_path.display().to_string(),
            args.modality.as_str(),
            &label_names,
            &report,
        );
        write_json(
            &run_dir.join("report.json"),
            &eval_report_json(&run_cfg, "kfold-test", &label_names, vec![json], None),
        )?;
        eprintln!(
            "run {run}: OA {:.4}  macro-F1 {:.4}",
            report.overall_accuracy, report.macro_f1
        );
    }
    let runs = splits.len() as f64;
    let mean_oa = oas.iter().sum::<f64>() / runs;
    let mean_f1 = macro_f1s.iter().sum::<f64>() / runs;
    let aggregate = serde_json::json!({
        "config": cfg.to_map(),
        "seed": cfg.seed,
        "runs": splits.len(),
        "train_size": args.train_size,
        "mean_overall_accuracy": mean_oa,
        "mean_macro_f1": mean_f1,
        "per_run_overall_accuracy": oas,
        "mean_per_class_f1": label_names.iter().zip(per_class_sums.iter())
            .map(|(name, sum)| (name.clone(), sum / runs))
            .collect::<std::collections::BTreeMap<_, _>>(),
    });
    let agg_path = args.out.join("aggregate.json");
    write_json(&agg_path, &aggregate)?;

    // Results table: mean OA / F1 then one column per class.
    println!("model\tOA\tF1\t{}", label_names.join("\t"));
    let per_class: Vec<String> = per_class_sums
        .iter()
        .map(|s| format!("{:.2}", s / runs))
        .collect();
    println!(
        "{}\t{:.1}\t{:.2}\t{}",
        args.modality.as_str(),
        100.0 * mean_oa,
        mean_f1,
        per_class.join("\t")
    );
    println!("{}", agg_path.display());
    Ok(())
}

