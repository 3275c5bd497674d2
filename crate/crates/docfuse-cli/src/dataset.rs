//! Sample loading: pairing each manifest record's text (tokenized and
//! embedded) with its raster (resized and standardized).

use std::path::Path;

use anyhow::{Context, Result};
use docfuse_core::image::{preprocess_image, ImageSample};
use docfuse_core::models::MultimodalSample;
use docfuse_core::text::{
    sequence_embed, tokenize_bytes, DocumentEmbedding, SifEmbedder, SubwordEmbedder, WordSequence,
};

use crate::manifest::Manifest;
use crate::pgm::read_raster;

/// Reads and tokenizes one record's text. An empty or whitespace-only
/// file is not an error: it yields an empty token list.
pub fn load_tokens(manifest: &Manifest, index: usize) -> Result<Vec<String>> {
    let record = &manifest.records[index];
    let path = manifest.text_path(record);
    let bytes =
        std::fs::read(&path).with_context(|| format!("reading text {}", path.display()))?;
    tokenize_bytes(&bytes).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn load_image(manifest: &Manifest, index: usize, target: usize) -> Result<ImageSample> {
    let record = &manifest.records[index];
    let path = manifest.image_path(record);
    let raw = read_raster(&path)?;
    preprocess_image(&raw, target).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn load_sequence(
    manifest: &Manifest,
    index: usize,
    embedder: &SubwordEmbedder,
    max_len: usize,
) -> Result<WordSequence> {
    let tokens = load_tokens(manifest, index)?;
    sequence_embed(&tokens, embedder, max_len).map_err(|e| anyhow::anyhow!("{e}"))
}

/// Loads one record with both modalities; empty text becomes a flagged
/// zero sequence.
pub fn load_multimodal(
    manifest: &Manifest,
    index: usize,
    embedder: &SubwordEmbedder,
    max_len: usize,
    image_size: usize,
) -> Result<MultimodalSample> {
    let record = &manifest.records[index];
    let label = manifest
        .label_index(&record.label)
        .with_context(|| format!("record {}: label '{}' not in label set", record.id, record.label))?;
    Ok(MultimodalSample {
        image: load_image(manifest, index, image_size)?,
        sequence: load_sequence(manifest, index, embedder, max_len)?,
        label,
    })
}

pub fn load_sequences(
    manifest: &Manifest,
    indices: &[usize],
    embedder: &SubwordEmbedder,
    max_len: usize,
) -> Result<Vec<WordSequence>> {
    indices
        .iter()
        .map(|&i| load_sequence(manifest, i, embedder, max_len))
        .collect()
}

pub fn load_images(
    manifest: &Manifest,
    indices: &[usize],
    target: usize,
) -> Result<Vec<ImageSample>> {
    indices.iter().map(|&i| load_image(manifest, i, target)).collect()
}

pub fn load_multimodals(
    manifest: &Manifest,
    indices: &[usize],
    embedder: &SubwordEmbedder,
    max_len: usize,
    image_size: usize,
) -> Result<Vec<MultimodalSample>> {
    indices
        .iter()
        .map(|&i| load_multimodal(manifest, i, embedder, max_len, image_size))
        .collect()
}

/// Fits SIF on the training documents and embeds every requested split
/// with the fitted state, as evaluation must reuse the training-corpus
/// frequencies and principal direction.
pub fn fit_and_embed_documents(
    manifest: &Manifest,
    train_indices: &[usize],
    other_indices: &[&[usize]],
    embedder: &SubwordEmbedder,
    a: f64,
) -> Result<(SifEmbedder, Vec<DocumentEmbedding>, Vec<Vec<DocumentEmbedding>>)> {
    let train_docs: Vec<Vec<String>> = train_indices
        .iter()
        .map(|&i| load_tokens(manifest, i))
        .collect::<Result<_>>()?;
    let (sif, train_embedded) =
        SifEmbedder::fit(&train_docs, embedder, a).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut others = Vec::with_capacity(other_indices.len());
    for indices in other_indices {
        let mut embedded = Vec::with_capacity(indices.len());
        for &i in indices.iter() {
            let tokens = load_tokens(manifest, i)?;
            embedded.push(
                sif.embed(&tokens, embedder)
                    .map_err(|e| anyhow::anyhow!("{e}"))?,
            );
        }
        others.push(embedded);
    }
    Ok((sif, train_embedded, others))
}

/// Writes a frequency table as `token<TAB>count` lines.
pub fn write_frequency_table(path: &Path, sif: &SifEmbedder) -> Result<()> {
    let mut out = String::new();
    for (token, count) in sif.freq.entries() {
        out.push_str(token);
        out.push('\t');
        out.push_str(&count.to_string());
        out.push('\n');
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Reads a `token<TAB>count` frequency table.
pub fn read_frequency_table(path: &Path) -> Result<docfuse_core::text::FrequencyTable> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (token, count) = line
            .split_once('\t')
            .with_context(|| format!("{}: line {} is not token<TAB>count", path.display(), lineno + 1))?;
        let count: u64 = count
            .parse()
            .with_context(|| format!("{}: line {}: bad count", path.display(), lineno + 1))?;
        entries.push((token.to_string(), count));
    }
    docfuse_core::text::FrequencyTable::from_entries(entries).map_err(|e| anyhow::anyhow!("{e}"))
}

/// Reads a dictionary file (one token per line).
pub fn read_dictionary(path: &Path) -> Result<std::collections::BTreeSet<String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(|l| l.trim().to_string()).filter(|l| !l.is_empty()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_synthetic, SynthConfig};
    use docfuse_core::rng::Rng;
    use docfuse_core::text::SubwordHasher;

    fn embedder() -> SubwordEmbedder {
        let hasher = SubwordHasher::new(3, 6, 500, 3).unwrap();
        SubwordEmbedder::random(hasher, 16, &mut Rng::from_seed(4))
    }

    #[test]
    fn loads_both_modalities() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = SynthConfig {
            num_samples: 8,
            ..SynthConfig::default()
        };
        let manifest = generate_synthetic(&cfg, tmp.path()).unwrap();
        let emb = embedder();
        let sample = load_multimodal(&manifest, 0, &emb, 64, 32).unwrap();
        assert_eq!(sample.image.pixels.shape(), &[3, 32, 32]);
        assert_eq!(sample.sequence.max_len, 64);
        assert!(!sample.sequence.empty_text);
        assert!(sample.label < 4);
    }

    #[test]
    fn empty_text_file_is_flagged_not_an_error() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = SynthConfig {
            num_samples: 4,
            ..SynthConfig::default()
        };
        let manifest = generate_synthetic(&cfg, tmp.path()).unwrap();
        std::fs::write(manifest.text_path(&manifest.records[0]), b"").unwrap();
        let emb = embedder();
        let sample = load_multimodal(&manifest, 0, &emb, 64, 32).unwrap();
        assert!(sample.sequence.empty_text);
        assert!(sample.sequence.matrix.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reload_gives_identical_tensors() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = SynthConfig {
            num_samples: 4,
            ..SynthConfig::default()
        };
        let manifest = generate_synthetic(&cfg, tmp.path()).unwrap();
        let emb = embedder();
        let a = load_multimodal(&manifest, 1, &emb, 64, 32).unwrap();
        let b = load_multimodal(&manifest, 1, &emb, 64, 32).unwrap();
        assert_eq!(a.image.pixels.data(), b.image.pixels.data());
        assert_eq!(a.sequence.matrix.data(), b.sequence.matrix.data());
    }

    #[test]
    fn invalid_utf8_reports_path_and_offset() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = SynthConfig {
            num_samples: 4,
            ..SynthConfig::default()
        };
        let manifest = generate_synthetic(&cfg, tmp.path()).unwrap();
        std::fs::write(manifest.text_path(&manifest.records[2]), b"ok \xfe bad").unwrap();
        let err = load_tokens(&manifest, 2).unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("byte offset 3"), "{msg}");
    }

    #[test]
    fn frequency_table_roundtrip() {
        let tmp = tempfile::tempdir().unwrap();
        let docs = vec![
            vec!["alpha".to_string(), "beta".to_string(), "alpha".to_string()],
            vec!["gamma".to_string()],
        ];
        let emb = embedder();
        let (sif, _) = SifEmbedder::fit(&docs, &emb, 1e-3).unwrap();
        let path = tmp.path().join("freq.tsv");
        write_frequency_table(&path, &sif).unwrap();
        let table = read_frequency_table(&path).unwrap();
        assert_eq!(table.count("alpha"), 2);
        assert_eq!(table.total(), 4);
    }
}
