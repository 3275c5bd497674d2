//! Flat `key = value` run configuration.
//!
//! One namespace mirrors every module's settings; unknown keys are
//! rejected. The canonical text form (sorted keys) is echoed into every
//! output artifact - checkpoints, evaluation reports, latency reports -
//! so each artifact carries its full provenance.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use docfuse_core::models::{
    FusionConfig, InvertedResidualSpec, TextCnnConfig, TextMlpConfig, VisionConfig,
};
use docfuse_core::ops::FusionKind;

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "DOCFUSE_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextModelKind {
    Cnn,
    Mlp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VisionPreset {
    Full,
    Desk,
    Micro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionInit {
    Scratch,
    Branches,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,

    pub embed_dim: usize,
    pub embed_n_min: usize,
    pub embed_n_max: usize,
    pub embed_buckets: usize,
    pub embed_hash_seed: u64,

    pub text_model: TextModelKind,
    pub text_max_len: usize,
    pub text_depth: usize,
    pub text_channels: usize,
    pub text_window: usize,
    pub text_pool_stride: usize,
    pub text_feature_dim: usize,
    pub text_dropout: f64,
    pub text_batchnorm: bool,
    pub text_train_embeddings: bool,

    pub mlp_hidden_width: usize,
    pub mlp_hidden_layers: usize,
    pub mlp_dropout: f64,
    pub mlp_batchnorm: bool,
    pub sif_a: f64,

    pub vision_preset: VisionPreset,
    pub vision_input_size: usize,
    pub vision_stem_channels: usize,
    pub vision_head_dim: usize,
    pub vision_feature_dim: usize,
    pub vision_blocks: String,
    pub vision_linear_bottleneck: bool,

    pub fusion_kind: FusionKind,
    pub fusion_hidden_width: usize,
    pub fusion_hidden_layers: usize,
    pub fusion_dropout: f64,
    pub fusion_init: FusionInit,
    pub fusion_text_branch: String,
    pub fusion_vision_branch: String,

    pub train_lr: f64,
    pub train_momentum: f64,
    pub train_batch: usize,
    /// 0 means "modality default": 100 epochs for text, 200 for image and
    /// fusion.
    pub train_epochs: usize,

    pub bench_warmup: usize,

    /// Comma-separated ordered class names; filled in by training and
    /// carried by checkpoints.
    pub labels: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            embed_dim: 64,
            embed_n_min: 3,
            embed_n_max: 6,
            embed_buckets: 50_000,
            embed_hash_seed: 0x5eed,
            text_model: TextModelKind::Cnn,
            text_max_len: 500,
            text_depth: 4,
            text_channels: 512,
            text_window: 12,
            text_pool_stride: 2,
            text_feature_dim: 128,
            text_dropout: 0.5,
            text_batchnorm: false,
            text_train_embeddings: true,
            mlp_hidden_width: 2048,
            mlp_hidden_layers: 2,
            mlp_dropout: 0.5,
            mlp_batchnorm: true,
            sif_a: 1e-3,
            vision_preset: VisionPreset::Desk,
            vision_input_size: 0,
            vision_stem_channels: 0,
            vision_head_dim: 0,
            vision_feature_dim: 0,
            vision_blocks: String::new(),
            vision_linear_bottleneck: false,
            fusion_kind: FusionKind::Concat,
            fusion_hidden_width: 256,
            fusion_hidden_layers: 2,
            fusion_dropout: 0.5,
            fusion_init: FusionInit::Scratch,
            fusion_text_branch: String::new(),
            fusion_vision_branch: String::new(),
            train_lr: 0.01,
            train_momentum: 0.9,
            train_batch: 40,
            train_epochs: 0,
            bench_warmup: 3,
            labels: String::new(),
        }
    }
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .with_context(|| format!("config key '{key}': expected an unsigned integer, got '{value}'"))
}

fn parse_u64(key: &str, value: &str) -> Result<u64> {
    value
        .parse()
        .with_context(|| format!("config key '{key}': expected an unsigned integer, got '{value}'"))
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .with_context(|| format!("config key '{key}': expected a number, got '{value}'"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => bail!("config key '{key}': expected true/false, got '{value}'"),
    }
}

impl RunConfig {
    /// Applies one `key = value` assignment; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "seed" => self.seed = parse_u64(key, value)?,
            "embed.dim" => self.embed_dim = parse_usize(key, value)?,
            "embed.n_min" => self.embed_n_min = parse_usize(key, value)?,
            "embed.n_max" => self.embed_n_max = parse_usize(key, value)?,
            "embed.buckets" => self.embed_buckets = parse_usize(key, value)?,
            "embed.hash_seed" => self.embed_hash_seed = parse_u64(key, value)?,
            "text.model" => {
                self.text_model = match value {
                    "cnn" => TextModelKind::Cnn,
                    "mlp" => TextModelKind::Mlp,
                    _ => bail!("config key 'text.model': expected cnn|mlp, got '{value}'"),
                }
            }
            "text.max_len" => self.text_max_len = parse_usize(key, value)?,
            "text.depth" => self.text_depth = parse_usize(key, value)?,
            "text.channels" => self.text_channels = parse_usize(key, value)?,
            "text.window" => self.text_window = parse_usize(key, value)?,
            "text.pool_stride" => self.text_pool_stride = parse_usize(key, value)?,
            "text.feature_dim" => self.text_feature_dim = parse_usize(key, value)?,
            "text.dropout" => self.text_dropout = parse_f64(key, value)?,
            "text.batchnorm" => self.text_batchnorm = parse_bool(key, value)?,
            "text.train_embeddings" => self.text_train_embeddings = parse_bool(key, value)?,
            "mlp.hidden_width" => self.mlp_hidden_width = parse_usize(key, value)?,
            "mlp.hidden_layers" => self.mlp_hidden_layers = parse_usize(key, value)?,
            "mlp.dropout" => self.mlp_dropout = parse_f64(key, value)?,
            "mlp.batchnorm" => self.mlp_batchnorm = parse_bool(key, value)?,
            "sif.a" => self.sif_a = parse_f64(key, value)?,
            "vision.preset" => {
                self.vision_preset = match value {
                    "full" => VisionPreset::Full,
                    "desk" => VisionPreset::Desk,
                    "micro" => VisionPreset::Micro,
                    _ => bail!("config key 'vision.preset': expected full|desk|micro, got '{value}'"),
                }
            }
            "vision.input_size" => self.vision_input_size = parse_usize(key, value)?,
            "vision.stem_channels" => self.vision_stem_channels = parse_usize(key, value)?,
            "vision.head_dim" => self.vision_head_dim = parse_usize(key, value)?,
            "vision.feature_dim" => self.vision_feature_dim = parse_usize(key, value)?,
            "vision.blocks" => self.vision_blocks = value.to_string(),
            "vision.linear_bottleneck" => self.vision_linear_bottleneck = parse_bool(key, value)?,
            "fusion.kind" => {
                self.fusion_kind = match value {
                    "concat" => FusionKind::Concat,
                    "sum" => FusionKind::Sum,
                    _ => bail!("config key 'fusion.kind': expected concat|sum, got '{value}'"),
                }
            }
            "fusion.hidden_width" => self.fusion_hidden_width = parse_usize(key, value)?,
            "fusion.hidden_layers" => self.fusion_hidden_layers = parse_usize(key, value)?,
            "fusion.dropout" => self.fusion_dropout = parse_f64(key, value)?,
            "fusion.init" => {
                self.fusion_init = match value {
                    "scratch" => FusionInit::Scratch,
                    "branches" => FusionInit::Branches,
                    _ => bail!("config key 'fusion.init': expected scratch|branches, got '{value}'"),
                }
            }
            "fusion.text_branch" => self.fusion_text_branch = value.to_string(),
            "fusion.vision_branch" => self.fusion_vision_branch = value.to_string(),
            "train.lr" => self.train_lr = parse_f64(key, value)?,
            "train.momentum" => self.train_momentum = parse_f64(key, value)?,
            "train.batch" => self.train_batch = parse_usize(key, value)?,
            "train.epochs" => self.train_epochs = parse_usize(key, value)?,
            "bench.warmup" => self.bench_warmup = parse_usize(key, value)?,
            "labels" => self.labels = value.to_string(),
            _ => bail!("unknown config key '{key}'"),
        }
        Ok(())
    }

    /// All keys with their current values, in canonical (sorted) order.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let bool_s = |b: bool| if b { "true" } else { "false" }.to_string();
        let kind = match self.text_model {
            TextModelKind::Cnn => "cnn",
            TextModelKind::Mlp => "mlp",
        };
        let preset = match self.vision_preset {
            VisionPreset::Full => "full",
            VisionPreset::Desk => "desk",
            VisionPreset::Micro => "micro",
        };
        let fkind = match self.fusion_kind {
            FusionKind::Concat => "concat",
            FusionKind::Sum => "sum",
        };
        let finit = match self.fusion_init {
            FusionInit::Scratch => "scratch",
            FusionInit::Branches => "branches",
        };
        let mut pairs = vec![
            ("bench.warmup", self.bench_warmup.to_string()),
            ("embed.buckets", self.embed_buckets.to_string()),
            ("embed.dim", self.embed_dim.to_string()),
            ("embed.hash_seed", self.embed_hash_seed.to_string()),
            ("embed.n_max", self.embed_n_max.to_string()),
            ("embed.n_min", self.embed_n_min.to_string()),
            ("fusion.dropout", self.fusion_dropout.to_string()),
            ("fusion.hidden_layers", self.fusion_hidden_layers.to_string()),
            ("fusion.hidden_width", self.fusion_hidden_width.to_string()),
            ("fusion.init", finit.to_string()),
            ("fusion.kind", fkind.to_string()),
            ("fusion.text_branch", self.fusion_text_branch.clone()),
            ("fusion.vision_branch", self.fusion_vision_branch.clone()),
            ("labels", self.labels.clone()),
            ("mlp.batchnorm", bool_s(self.mlp_batchnorm)),
            ("mlp.dropout", self.mlp_dropout.to_string()),
            ("mlp.hidden_layers", self.mlp_hidden_layers.to_string()),
            ("mlp.hidden_width", self.mlp_hidden_width.to_string()),
            ("seed", self.seed.to_string()),
            ("sif.a", self.sif_a.to_string()),
            ("text.batchnorm", bool_s(self.text_batchnorm)),
            ("text.channels", self.text_channels.to_string()),
            ("text.depth", self.text_depth.to_string()),
            ("text.dropout", self.text_dropout.to_string()),
            ("text.feature_dim", self.text_feature_dim.to_string()),
            ("text.max_len", self.text_max_len.to_string()),
            ("text.model", kind.to_string()),
            ("text.pool_stride", self.text_pool_stride.to_string()),
            ("text.train_embeddings", bool_s(self.text_train_embeddings)),
            ("text.window", self.text_window.to_string()),
            ("train.batch", self.train_batch.to_string()),
            ("train.epochs", self.train_epochs.to_string()),
            ("train.lr", self.train_lr.to_string()),
            ("train.momentum", self.train_momentum.to_string()),
            ("vision.blocks", self.vision_blocks.clone()),
            ("vision.feature_dim", self.vision_feature_dim.to_string()),
            ("vision.head_dim", self.vision_head_dim.to_string()),
            ("vision.input_size", self.vision_input_size.to_string()),
            ("vision.linear_bottleneck", bool_s(self.vision_linear_bottleneck)),
            ("vision.preset", preset.to_string()),
            ("vision.stem_channels", self.vision_stem_channels.to_string()),
        ];
        pairs.sort_by_key(|(k, _)| *k);
        pairs
    }

    /// Canonical flat text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.pairs() {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    /// Sorted map for embedding in JSON artifacts.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.pairs()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    /// Parses the flat text form; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("config line {}: expected 'key = value', got '{raw}'", lineno + 1))?;
            self.set(key.trim(), value.trim())
                .with_context(|| format!("config line {}", lineno + 1))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        RunConfig::from_text(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn label_names(&self) -> Vec<String> {
        if self.labels.is_empty() {
            Vec::new()
        } else {
            self.labels.split(',').map(|s| s.to_string()).collect()
        }
    }

    pub fn set_label_names(&mut self, names: &[String]) {
        self.labels = names.join(",");
    }

    pub fn num_classes(&self) -> usize {
        self.label_names().len()
    }

    /// Default epoch budget per modality when `train.epochs = 0`:
    /// 100 for text, 200 for image and fusion.
    pub fn epochs_for(&self, modality: &str) -> usize {
        if self.train_epochs != 0 {
            return self.train_epochs;
        }
        match modality {
            "text" => 100,
            _ => 200,
        }
    }

    pub fn text_cnn_config(&self) -> TextCnnConfig {
        TextCnnConfig {
            embed_dim: self.embed_dim,
            max_len: self.text_max_len,
            depth: self.text_depth,
            channels: self.text_channels,
            window: self.text_window,
            pool_stride: self.text_pool_stride,
            feature_dim: self.text_feature_dim,
            dropout: self.text_dropout,
            num_classes: self.num_classes(),
            batchnorm: self.text_batchnorm,
            train_embeddings: self.text_train_embeddings,
        }
    }

    pub fn text_mlp_config(&self) -> TextMlpConfig {
        TextMlpConfig {
            input_dim: self.embed_dim,
            hidden_width: self.mlp_hidden_width,
            num_hidden_layers: self.mlp_hidden_layers,
            feature_dim: self.text_feature_dim,
            dropout: self.mlp_dropout,
            num_classes: self.num_classes(),
            batchnorm: self.mlp_batchnorm,
        }
    }

    pub fn vision_config(&self) -> Result<VisionConfig> {
        let k = self.num_classes().max(1);
        let mut cfg = match self.vision_preset {
            VisionPreset::Full => VisionConfig::full(k),
            VisionPreset::Desk => VisionConfig::desk(k),
            VisionPreset::Micro => VisionConfig::micro(k),
        };
        if self.vision_input_size != 0 {
            cfg.input_size = self.vision_input_size;
        }
        if self.vision_stem_channels != 0 {
            cfg.stem_channels = self.vision_stem_channels;
        }
        if self.vision_head_dim != 0 {
            cfg.head_dim = self.vision_head_dim;
        }
        if self.vision_feature_dim != 0 {
            cfg.feature_dim = self.vision_feature_dim;
        }
        if !self.vision_blocks.is_empty() {
            cfg.blocks = parse_blocks(&self.vision_blocks)?;
        }
        cfg.linear_bottleneck = self.vision_linear_bottleneck;
        cfg.num_classes = k;
        Ok(cfg)
    }

    pub fn fusion_config(&self) -> Result<FusionConfig> {
        let mut text = self.text_cnn_config();
        let mut vision = self.vision_config()?;
        // Branch feature widths must agree for fusion.
        vision.feature_dim = text.feature_dim;
        text.num_classes = self.num_classes().max(1);
        vision.num_classes = self.num_classes().max(1);
        Ok(FusionConfig {
            text,
            vision,
            hidden_width: self.fusion_hidden_width,
            hidden_layers: self.fusion_hidden_layers,
            dropout: self.fusion_dropout,
            num_classes: self.num_classes().max(1),
            kind: self.fusion_kind,
        })
    }

    /// Effective vision input size (preset default unless overridden).
    pub fn effective_image_size(&self) -> usize {
        if self.vision_input_size != 0 {
            return self.vision_input_size;
        }
        match self.vision_preset {
            VisionPreset::Full => 384,
            VisionPreset::Desk => 96,
            VisionPreset::Micro => 16,
        }
    }
}

/// Block list syntax: `t:c:s:r` items separated by commas, e.g.
/// `1:16:1:1,4:24:2:2`.
pub fn parse_blocks(spec: &str) -> Result<Vec<InvertedResidualSpec>> {
    let mut blocks = Vec::new();
    for item in spec.split(',') {
        let parts: Vec<&str> = item.split(':').collect();
        if parts.len() != 4 {
            bail!("vision.blocks item '{item}': expected t:c:s:r");
        }
        blocks.push(InvertedResidualSpec::new(
            parse_usize("vision.blocks t", parts[0])?,
            parse_usize("vision.blocks c", parts[1])?,
            parse_usize("vision.blocks s", parts[2])?,
            parse_usize("vision.blocks r", parts[3])?,
        ));
    }
    Ok(blocks)
}
