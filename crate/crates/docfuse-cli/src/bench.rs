//! Per-stage inference latency benchmark.
//!
//! Each iteration pushes one batch through the pipeline, timing every
//! stage with the monotonic clock: file loading, text embedding, the text
//! branch, image preprocessing, the image branch and the fusion head.
//! Warm-up iterations run first and are excluded from the statistics.
//! Stages a model does not have report zeros.
//!
//! Sequential mode (the default) forwards whole batches, so larger batches
//! amortize per-call and allocation overhead into a lower per-sample mean.
//! In parallel mode the batch is split across threads within each stage;
//! stage boundaries (and the stage-sum invariant) are preserved and the
//! reported time is the wall time of each parallel section.

use std::time::Instant;

use anyhow::{Context, Result};
use docfuse_core::image::{preprocess_image, GrayImage, ImageSample};
use docfuse_core::models::Classifier;
use docfuse_core::ops::fuse_forward;
use docfuse_core::tensor::Tensor;
use docfuse_core::text::{sequence_embed, tokenize_bytes, DocumentEmbedding, WordSequence};

use crate::checkpoint::LoadedModel;
use crate::manifest::Manifest;
use crate::pgm::decode_pgm;
use crate::report::{LatencyReportJson, StageStats};
use crate::runconfig::RunConfig;
use crate::usage_error;

pub const STAGE_NAMES: [&str; 6] = [
    "load",
    "text_embed",
    "text_forward",
    "image_preprocess",
    "image_forward",
    "fusion_head",
];

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub iterations: usize,
    pub batch: usize,
    pub warmup: usize,
    pub parallel: bool,
    pub hardware_note: String,
}

fn time_ms<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let value = f()?;
    Ok((value, start.elapsed().as_secs_f64() * 1000.0))
}

/// Order-preserving map over a batch, threaded when requested.
fn batch_map<T, U, F>(parallel: bool, items: Vec<T>, f: F) -> Result<Vec<U>>
where
    T: Send,
    U: Send,
    F: Fn(T) -> Result<U> + Sync,
{
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(items.len().max(1));
    if !parallel || threads <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    let chunk_size = items.len().div_ceil(threads);
    let chunks: Vec<Vec<T>> = {
        let mut chunks = Vec::new();
        let mut iter = items.into_iter();
        loop {
            let chunk: Vec<T> = iter.by_ref().take(chunk_size).collect();
            if chunk.is_empty() {
                break;
            }
            chunks.push(chunk);
        }
        chunks
    };
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| scope.spawn(move || chunk.into_iter().map(f).collect::<Result<Vec<U>>>()))
            .collect();
        let mut out = Vec::new();
        for handle in handles {
            out.extend(handle.join().expect("bench worker panicked")?);
        }
        Ok(out)
    })
}

fn stats(samples: &[f64]) -> StageStats {
    if samples.is_empty() {
        return StageStats {
            mean_ms: 0.0,
            p50_ms: 0.0,
            p95_ms: 0.0,
        };
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    let idx = |p: usize| sorted[(sorted.len() * p / 100).min(sorted.len() - 1)];
    StageStats {
        mean_ms: mean,
        p50_ms: idx(50),
        p95_ms: idx(95),
    }
}

enum TextInput {
    None,
    Sequences(Vec<WordSequence>),
    Documents(Vec<DocumentEmbedding>),
}

/// Branch features: one batched tensor in sequential mode, per-sample rows
/// in parallel mode.
enum BranchOut {
    None,
    Batch(Tensor),
    PerSample(Vec<Tensor>),
}

pub fn run_bench(
    model: &LoadedModel,
    cfg: &RunConfig,
    manifest: &Manifest,
    opts: &BenchOptions,
) -> Result<LatencyReportJson> {
    if opts.iterations < 10 {
        return Err(usage_error(format!(
            "bench: need at least 10 iterations, got {}",
            opts.iterations
        )));
    }
    if opts.batch == 0 {
        return Err(usage_error("bench: batch must be >= 1"));
    }
    let needs_text = !matches!(model, LoadedModel::Vision(_));
    let needs_image = matches!(model, LoadedModel::Vision(_) | LoadedModel::Fusion(_));
    let image_size = cfg.effective_image_size();
    let n = manifest.records.len();

    let mut per_stage: Vec<Vec<f64>> = vec![Vec::new(); STAGE_NAMES.len()];
    let mut totals: Vec<f64> = Vec::new();

    for iter in 0..opts.warmup + opts.iterations {
        let indices: Vec<usize> = (0..opts.batch)
            .map(|j| (iter * opts.batch + j) % n)
            .collect();
        let total_start = Instant::now();

        // load: raw bytes off disk, image decoded but not resized
        let ((texts, images), t_load) = time_ms(|| {
            let mut texts: Vec<Vec<u8>> = Vec::new();
            let mut images: Vec<GrayImage> = Vec::new();
            for &i in &indices {
                let record = &manifest.records[i];
                if needs_text {
                    let p = manifest.text_path(record);
                    texts.push(
                        std::fs::read(&p).with_context(|| format!("reading {}", p.display()))?,
                    );
                }
                if needs_image {
                    let p = manifest.image_path(record);
                    let bytes =
                        std::fs::read(&p).with_context(|| format!("reading {}", p.display()))?;
                    images.push(decode_pgm(&bytes)?);
                }
            }
            Ok((texts, images))
        })?;

        // text_embed: tokenize + embed
        let (text_input, t_embed) = match model {
            LoadedModel::TextCnn(m) => time_ms(|| {
                batch_map(opts.parallel, texts, |bytes| {
                    let tokens = tokenize_bytes(&bytes).map_err(|e| anyhow::anyhow!("{e}"))?;
                    sequence_embed(&tokens, &m.embedder, m.cfg.max_len)
                        .map_err(|e| anyhow::anyhow!("{e}"))
                })
                .map(TextInput::Sequences)
            })?,
            LoadedModel::Fusion(m) => time_ms(|| {
                batch_map(opts.parallel, texts, |bytes| {
                    let tokens = tokenize_bytes(&bytes).map_err(|e| anyhow::anyhow!("{e}"))?;
                    sequence_embed(&tokens, &m.text.embedder, m.cfg.text.max_len)
                        .map_err(|e| anyhow::anyhow!("{e}"))
                })
                .map(TextInput::Sequences)
            })?,
            LoadedModel::TextMlp { embedder, sif, .. } => time_ms(|| {
                batch_map(opts.parallel, texts, |bytes| {
                    let tokens = tokenize_bytes(&bytes).map_err(|e| anyhow::anyhow!("{e}"))?;
                    sif.embed(&tokens, embedder).map_err(|e| anyhow::anyhow!("{e}"))
                })
                .map(TextInput::Documents)
            })?,
            LoadedModel::Vision(_) => (TextInput::None, 0.0),
        };

        // text_forward: branch features (fusion) or full logits
        let (text_out, t_text_fwd) = match (model, &text_input) {
            (LoadedModel::TextCnn(m), TextInput::Sequences(seqs)) => {
                let refs: Vec<&WordSequence> = seqs.iter().collect();
                time_ms(|| {
                    if opts.parallel {
                        batch_map(true, refs, |s| {
                            m.logits_infer(s).map_err(|e| anyhow::anyhow!("{e}"))
                        })?;
                    } else {
                        m.logits_infer_batch(&refs).map_err(|e| anyhow::anyhow!("{e}"))?;
                    }
                    Ok(BranchOut::None)
                })?
            }
            (LoadedModel::TextMlp { model: m, .. }, TextInput::Documents(docs)) => {
                let refs: Vec<&DocumentEmbedding> = docs.iter().collect();
                time_ms(|| {
                    if opts.parallel {
                        batch_map(true, refs, |d| {
                            m.infer_logits(d).map_err(|e| anyhow::anyhow!("{e}"))
                        })?;
                    } else {
                        m.logits_infer_batch(&refs).map_err(|e| anyhow::anyhow!("{e}"))?;
                    }
                    Ok(BranchOut::None)
                })?
            }
            (LoadedModel::Fusion(m), TextInput::Sequences(seqs)) => {
                let refs: Vec<&WordSequence> = seqs.iter().collect();
                time_ms(|| {
                    if opts.parallel {
                        batch_map(true, refs, |s| {
                            m.text.features_infer(s).map_err(|e| anyhow::anyhow!("{e}"))
                        })
                        .map(BranchOut::PerSample)
                    } else {
                        m.text
                            .features_infer_batch(&refs)
                            .map(BranchOut::Batch)
                            .map_err(|e| anyhow::anyhow!("{e}"))
                    }
                })?
            }
            _ => (BranchOut::None, 0.0),
        };

        // image_preprocess: resize + standardize
        let (samples, t_pre) = if needs_image {
            time_ms(|| {
                batch_map(opts.parallel, images, |img| {
                    preprocess_image(&img, image_size).map_err(|e| anyhow::anyhow!("{e}"))
                })
            })?
        } else {
            (Vec::<ImageSample>::new(), 0.0)
        };

        // image_forward
        let (image_out, t_img_fwd) = match model {
            LoadedModel::Vision(m) => {
                let refs: Vec<&ImageSample> = samples.iter().collect();
                time_ms(|| {
                    if opts.parallel {
                        batch_map(true, refs, |s| {
                            m.features_infer(s).map_err(|e| anyhow::anyhow!("{e}"))
                        })?;
                    } else {
                        m.logits_infer_batch(&refs).map_err(|e| anyhow::anyhow!("{e}"))?;
                    }
                    Ok(BranchOut::None)
                })?
            }
            LoadedModel::Fusion(m) => {
                let refs: Vec<&ImageSample> = samples.iter().collect();
                time_ms(|| {
                    if opts.parallel {
                        batch_map(true, refs, |s| {
                            m.vision.features_infer(s).map_err(|e| anyhow::anyhow!("{e}"))
                        })
                        .map(BranchOut::PerSample)
                    } else {
                        m.vision
                            .features_infer_batch(&refs)
                            .map(BranchOut::Batch)
                            .map_err(|e| anyhow::anyhow!("{e}"))
                    }
                })?
            }
            _ => (BranchOut::None, 0.0),
        };

        // fusion_head: fuse + joint classifier
        let t_head = match (model, &text_out, &image_out) {
            (LoadedModel::Fusion(m), BranchOut::Batch(tf), BranchOut::Batch(vf)) => {
                let (_, t) = time_ms(|| {
                    let fused =
                        fuse_forward(tf, vf, m.cfg.kind).map_err(|e| anyhow::anyhow!("{e}"))?;
                    m.classifier_infer(&fused).map_err(|e| anyhow::anyhow!("{e}"))
                })?;
                t
            }
            (LoadedModel::Fusion(m), BranchOut::PerSample(tfs), BranchOut::PerSample(vfs)) => {
                let pairs: Vec<_> = tfs.iter().zip(vfs.iter()).collect();
                let (_, t) = time_ms(|| {
                    batch_map(true, pairs, |(tf, vf)| {
                        let fused = fuse_forward(tf, vf, m.cfg.kind)
                            .map_err(|e| anyhow::anyhow!("{e}"))?;
                        m.classifier_infer(&fused).map_err(|e| anyhow::anyhow!("{e}"))
                    })
                })?;
                t
            }
            _ => 0.0,
        };

        let total = total_start.elapsed().as_secs_f64() * 1000.0;
        if iter >= opts.warmup {
            for (acc, value) in per_stage
                .iter_mut()
                .zip([t_load, t_embed, t_text_fwd, t_pre, t_img_fwd, t_head])
            {
                acc.push(value);
            }
            totals.push(total);
        }
    }

    let stages: std::collections::BTreeMap<String, StageStats> = STAGE_NAMES
        .iter()
        .zip(per_stage.iter())
        .map(|(name, samples)| (name.to_string(), stats(samples)))
        .collect();
    let total = stats(&totals);
    let per_sample_total_mean_ms = total.mean_ms / opts.batch as f64;
    let stage_mean_sum_ms: f64 = stages.values().map(|s| s.mean_ms).sum();
    Ok(LatencyReportJson {
        config: cfg.to_map(),
        seed: cfg.seed,
        model: model.kind().as_str().to_string(),
        batch_size: opts.batch,
        iterations: opts.iterations,
        warmup_excluded: opts.warmup,
        parallel: opts.parallel,
        hardware_note: opts.hardware_note.clone(),
        stages,
        total,
        stage_mean_sum_ms,
        per_sample_total_mean_ms,
        ocr_ms: None,
    })
}
