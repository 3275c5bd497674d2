//! Checkpoint format and model reconstruction.
//!
//! Layout: the magic string `DFUSE1`, a one-byte model kind, the canonical
//! run-config text (length-prefixed UTF-8, including the label set and
//! seed), then each parameter tensor in graph order as a length-prefixed
//! name, a `u32` rank, `u32` extents and little-endian `f32` values.
//! Loading and re-saving a checkpoint reproduces it byte for byte.
//!
//! The SIF text model stores its principal direction as the tensor
//! `sif.pc` and its corpus frequency table in a `<stem>.freq.tsv` sidecar
//! (token<TAB>count lines); string tables have no place in the tensor
//! section.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use docfuse_core::models::{FusionModel, TextCnnModel, TextMlpModel, VisionModel};
use docfuse_core::rng::Rng;
use docfuse_core::tensor::Tensor;
use docfuse_core::text::{SifEmbedder, SubwordEmbedder, SubwordHasher};

use crate::runconfig::RunConfig;

pub const MAGIC: &[u8; 6] = b"DFUSE1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    TextCnn,
    TextMlp,
    Vision,
    Fusion,
}

impl ModelKind {
    pub fn code(&self) -> u8 {
        match self {
            ModelKind::TextCnn => 1,
            ModelKind::TextMlp => 2,
            ModelKind::Vision => 3,
            ModelKind::Fusion => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<ModelKind> {
        match code {
            1 => Some(ModelKind::TextCnn),
            2 => Some(ModelKind::TextMlp),
            3 => Some(ModelKind::Vision),
            4 => Some(ModelKind::Fusion),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::TextCnn => "text_cnn",
            ModelKind::TextMlp => "text_mlp",
            ModelKind::Vision => "vision",
            ModelKind::Fusion => "fusion",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub kind: ModelKind,
    pub config: RunConfig,
    pub tensors: Vec<(String, Tensor)>,
}

fn push_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn push_str(out: &mut Vec<u8>, s: &str) {
    push_u32(out, s.len() as u32);
    out.extend_from_slice(s.as_bytes());
}

pub fn encode_checkpoint(
    kind: ModelKind,
    config: &RunConfig,
    entries: &[(String, &Tensor)],
) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(kind.code());
    push_str(&mut out, &config.to_text());
    push_u32(&mut out, entries.len() as u32);
    for (name, tensor) in entries {
        push_str(&mut out, name);
        push_u32(&mut out, tensor.rank() as u32);
        for &d in tensor.shape() {
            push_u32(&mut out, d as u32);
        }
        for &v in tensor.data() {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            bail!("checkpoint truncated at byte {}", self.pos);
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn string(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        Ok(std::str::from_utf8(self.take(len)?)?.to_string())
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Checkpoint> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(6)? != MAGIC {
        bail!("not a docfuse checkpoint (bad magic)");
    }
    let code = r.take(1)?[0];
    let kind = ModelKind::from_code(code)
        .with_context(|| format!("unknown model kind code {code}"))?;
    let config_text = r.string()?;
    let config = RunConfig::from_text(&config_text).context("checkpoint config")?;
    let n = r.u32()? as usize;
    let mut tensors = Vec::with_capacity(n);
    for _ in 0..n {
        let name = r.string()?;
        let rank = r.u32()? as usize;
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(r.u32()? as usize);
        }
        let count: usize = shape.iter().product();
        let raw = r.take(count * 4)?;
        let mut data = Vec::with_capacity(count);
        for chunk in raw.chunks_exact(4) {
            data.push(f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]) as f64);
        }
        tensors.push((
            name,
            Tensor::from_vec(&shape, data).map_err(|e| anyhow::anyhow!("{e}"))?,
        ));
    }
    if r.pos != bytes.len() {
        bail!("checkpoint has {} trailing bytes", bytes.len() - r.pos);
    }
    Ok(Checkpoint {
        kind,
        config,
        tensors,
    })
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    decode_checkpoint(&bytes).with_context(|| format!("decoding {}", path.display()))
}

/// Copies checkpoint tensors into a model's state. Every state entry must
/// be provided and match in shape; extra tensors are rejected.
pub fn apply_state(targets: Vec<(String, &mut Tensor)>, tensors: &[(String, Tensor)]) -> Result<()> {
    let mut provided: std::collections::BTreeMap<&str, &Tensor> =
        tensors.iter().map(|(n, t)| (n.as_str(), t)).collect();
    for (name, target) in targets {
        let tensor = provided
            .remove(name.as_str())
            .with_context(|| format!("checkpoint is missing tensor '{name}'"))?;
        if tensor.shape() != target.shape() {
            bail!(
                "tensor '{name}': checkpoint shape {:?} != model shape {:?}",
                tensor.shape(),
                target.shape()
            );
        }
        target.data_mut().copy_from_slice(tensor.data());
    }
    if let Some((name, _)) = provided.iter().next() {
        bail!("checkpoint has unexpected tensor '{name}'");
    }
    Ok(())
}

/// Copies a subset of tensors into matching model state entries (used for
/// branch-pretrained initialization). Every provided tensor must land.
pub fn apply_state_subset(
    targets: Vec<(String, &mut Tensor)>,
    tensors: &[(String, Tensor)],
) -> Result<()> {
    let mut targets: std::collections::BTreeMap<String, &mut Tensor> =
        targets.into_iter().collect();
    for (name, tensor) in tensors {
        let target = targets
            .get_mut(name)
            .with_context(|| format!("model has no state entry '{name}'"))?;
        if tensor.shape() != target.shape() {
            bail!(
                "tensor '{name}': source shape {:?} != model shape {:?}",
                tensor.shape(),
                target.shape()
            );
        }
        target.data_mut().copy_from_slice(tensor.data());
    }
    Ok(())
}

pub fn build_hasher(cfg: &RunConfig) -> Result<SubwordHasher> {
    SubwordHasher::new(cfg.embed_n_min, cfg.embed_n_max, cfg.embed_buckets, cfg.embed_hash_seed)
        .map_err(|e| anyhow::anyhow!("{e}"))
}

/// Random embedder from the config's hashing parameters and seed. The
/// table contents only matter until a checkpoint overwrites them.
pub fn build_embedder(cfg: &RunConfig) -> Result<SubwordEmbedder> {
    let hasher = build_hasher(cfg)?;
    let mut rng = Rng::from_seed(cfg.seed ^ 0xe5be);
    Ok(SubwordEmbedder::random(hasher, cfg.embed_dim, &mut rng))
}

/// A model plus everything needed to run it on raw files.
#[derive(Debug)]
pub enum LoadedModel {
    TextCnn(TextCnnModel),
    TextMlp {
        model: TextMlpModel,
        embedder: SubwordEmbedder,
        sif: SifEmbedder,
    },
    Vision(VisionModel),
    Fusion(FusionModel),
}

impl LoadedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            LoadedModel::TextCnn(_) => ModelKind::TextCnn,
            LoadedModel::TextMlp { .. } => ModelKind::TextMlp,
            LoadedModel::Vision(_) => ModelKind::Vision,
            LoadedModel::Fusion(_) => ModelKind::Fusion,
        }
    }

    /// State entries in graph order (cloned names, borrowed tensors).
    pub fn state(&self) -> Vec<(String, &Tensor)> {
        let mut out = Vec::new();
        match self {
            LoadedModel::TextCnn(m) => m.state("", &mut out),
            LoadedModel::TextMlp { model, embedder, sif } => {
                out.push(("embedding.table".to_string(), &embedder.table));
                out.push(("sif.pc".to_string(), &sif.pc));
                model.state("", &mut out);
            }
            LoadedModel::Vision(m) => m.state("", &mut out),
            LoadedModel::Fusion(m) => m.state(&mut out),
        }
        out
    }
}

/// Sidecar path holding the frequency table of a SIF text checkpoint.
pub fn freq_sidecar(path: &Path) -> PathBuf {
    path.with_extension("freq.tsv")
}

pub fn save_model(path: &Path, model: &LoadedModel, config: &RunConfig) -> Result<()> {
    let entries = model.state();
    let bytes = encode_checkpoint(model.kind(), config, &entries);
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    if let LoadedModel::TextMlp { sif, .. } = model {
        crate::dataset::write_frequency_table(&freq_sidecar(path), sif)?;
    }
    Ok(())
}

/// Rebuilds the model named by a checkpoint and restores its parameters.
pub fn load_model(path: &Path) -> Result<(LoadedModel, RunConfig)> {
    let ckpt = read_checkpoint(path)?;
    let cfg = ckpt.config.clone();
    if cfg.num_classes() == 0 {
        bail!(
            "checkpoint {} carries no label set; it was not produced by training",
            path.display()
        );
    }
    let mut rng = Rng::from_seed(cfg.seed);
    let model = match ckpt.kind {
        ModelKind::TextCnn => {
            let embedder = build_embedder(&cfg)?;
            let mut model = TextCnnModel::new(cfg.text_cnn_config(), embedder, &mut rng)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut targets = Vec::new();
            model.state_mut("", &mut targets);
            apply_state(targets, &ckpt.tensors)?;
            LoadedModel::TextCnn(model)
        }
        ModelKind::TextMlp => {
            let mut embedder = build_embedder(&cfg)?;
            let mut model = TextMlpModel::new(cfg.text_mlp_config(), &mut rng)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut pc = Tensor::zeros(&[cfg.embed_dim]);
            {
                let mut targets: Vec<(String, &mut Tensor)> = Vec::new();
                targets.push(("embedding.table".to_string(), &mut embedder.table));
                targets.push(("sif.pc".to_string(), &mut pc));
                model.state_mut("", &mut targets);
                apply_state(targets, &ckpt.tensors)?;
            }
            let freq = crate::dataset::read_frequency_table(&freq_sidecar(path))?;
            let sif = SifEmbedder {
                a: cfg.sif_a,
                freq,
                pc,
            };
            LoadedModel::TextMlp {
                model,
                embedder,
                sif,
            }
        }
        ModelKind::Vision => {
            let mut model = VisionModel::new(cfg.vision_config()?, &mut rng)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut targets = Vec::new();
            model.state_mut("", &mut targets);
            apply_state(targets, &ckpt.tensors)?;
            LoadedModel::Vision(model)
        }
        ModelKind::Fusion => {
            let embedder = build_embedder(&cfg)?;
            let mut model = FusionModel::new(cfg.fusion_config()?, embedder, &mut rng)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut targets = Vec::new();
            model.state_mut(&mut targets);
            apply_state(targets, &ckpt.tensors)?;
            LoadedModel::Fusion(model)
        }
    };
    Ok((model, cfg))
}

/// Extracts one branch of a fusion checkpoint as a standalone model. The
/// branch's feature extractor and head come from the fusion checkpoint
/// (the head is whatever the fusion model carried - trained when the
/// fusion was branch-initialized, otherwise as first initialized).
pub fn export_branch(fusion_path: &Path, branch: ModelKind, out: &Path) -> Result<()> {
    let ckpt = read_checkpoint(fusion_path)?;
    if ckpt.kind != ModelKind::Fusion {
        bail!(
            "{} is a {} checkpoint, not fusion",
            fusion_path.display(),
            ckpt.kind.as_str()
        );
    }
    let prefix = match branch {
        ModelKind::TextCnn => "text.",
        ModelKind::Vision => "vision.",
        other => bail!("cannot export a {} branch", other.as_str()),
    };
    let tensors: Vec<(String, Tensor)> = ckpt
        .tensors
        .iter()
        .filter(|(n, _)| n.starts_with(prefix))
        .map(|(n, t)| (n[prefix.len()..].to_string(), t.clone()))
        .collect();
    if tensors.is_empty() {
        bail!("fusion checkpoint has no '{prefix}' tensors");
    }
    let cfg = ckpt.config.clone();
    let mut rng = Rng::from_seed(cfg.seed);
    let model = match branch {
        ModelKind::TextCnn => {
            let embedder = build_embedder(&cfg)?;
            let mut model = TextCnnModel::new(cfg.text_cnn_config(), embedder, &mut rng)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut targets = Vec::new();
            model.state_mut("", &mut targets);
            apply_state(targets, &tensors)?;
            LoadedModel::TextCnn(model)
        }
        ModelKind::Vision => {
            let mut vision_cfg = cfg.fusion_config()?.vision;
            vision_cfg.num_classes = cfg.num_classes();
            let mut model = VisionModel::new(vision_cfg, &mut rng)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut targets = Vec::new();
            model.state_mut("", &mut targets);
            apply_state(targets, &tensors)?;
            LoadedModel::Vision(model)
        }
        _ => unreachable!(),
    };
    save_model(out, &model, &cfg)
}
