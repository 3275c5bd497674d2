//! JSON report types for evaluation and benchmarking. Struct field order
//! is the serialization order and maps are sorted, so output bytes are
//! stable for identical inputs; schemas are shipped under `docs/`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use docfuse_core::metrics::EvalReport;
use serde::{Deserialize, Serialize};

use crate::runconfig::RunConfig;

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelEvalJson {
    pub path: String,
    pub kind: String,
    pub n_samples: usize,
    pub overall_accuracy: f64,
    pub macro_f1: f64,
    pub per_class_f1: BTreeMap<String, f64>,
    pub confusion: Vec<Vec<u64>>,
    pub undefined_f1_classes: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EvalReportJson {
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub split: String,
    pub label_names: Vec<String>,
    pub models: Vec<ModelEvalJson>,
    /// Present when two single-modality models were evaluated together.
    pub oracle_accuracy: Option<f64>,
}

pub fn model_eval_json(
    path: &str,
    kind: &str,
    label_names: &[String],
    report: &EvalReport,
) -> ModelEvalJson {
    ModelEvalJson {
        path: path.to_string(),
        kind: kind.to_string(),
        n_samples: report.n_samples,
        overall_accuracy: report.overall_accuracy,
        macro_f1: report.macro_f1,
        per_class_f1: label_names
            .iter()
            .cloned()
            .zip(report.per_class_f1.iter().copied())
            .collect(),
        confusion: report.confusion.clone(),
        undefined_f1_classes: report
            .undefined_f1_classes
            .iter()
            .map(|&c| label_names[c].clone())
            .collect(),
    }
}

pub fn eval_report_json(
    config: &RunConfig,
    split: &str,
    label_names: &[String],
    models: Vec<ModelEvalJson>,
    oracle_accuracy: Option<f64>,
) -> EvalReportJson {
    EvalReportJson {
        config: config.to_map(),
        seed: config.seed,
        split: split.to_string(),
        label_names: label_names.to_vec(),
        models,
        oracle_accuracy,
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Confusion matrix as CSV: header `label,<pred...>`, one row per true
/// class.
pub fn confusion_csv(label_names: &[String], confusion: &[Vec<u64>]) -> String {
    let mut out = String::from("label");
    for name in label_names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (c, row) in confusion.iter().enumerate() {
        out.push_str(&label_names[c]);
        for v in row {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageStats {
    pub mean_ms: f64,
    pub p50_ms: f64,
    pub p95_ms: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LatencyReportJson {
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub model: String,
    pub batch_size: usize,
    pub iterations: usize,
    pub warmup_excluded: usize,
    pub parallel: bool,
    pub hardware_note: String,
    /// Per-stage wall-clock stats over iterations (whole-batch times).
    pub stages: BTreeMap<String, StageStats>,
    pub total: StageStats,
    /// Sum of stage means; within 5% of `total.mean_ms` by construction.
    pub stage_mean_sum_ms: f64,
    pub per_sample_total_mean_ms: f64,
    /// Reserved for merging an external OCR timing into an end-to-end
    /// figure; never measured here.
    pub ocr_ms: Option<f64>,
}
