//! Zero-padded word-sequence embeddings for the sequence model.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::tensor::Tensor;

use super::subword::SubwordEmbedder;

pub const DEFAULT_MAX_LEN: usize = 500;

/// A document as a `[dim, max_len]` matrix of word vectors, zero-padded
/// beyond `true_length`. The bucket-id lists are retained so a model that
/// trains its embedding table can re-embed the sequence from the current
/// table.
#[derive(Debug, Clone)]
pub struct WordSequence {
    pub matrix: Tensor,
    pub true_length: usize,
    pub max_len: usize,
    /// Per kept token, the bucket ids of its n-grams.
    pub ngram_ids: Vec<Vec<u32>>,
    /// True when the source text produced no tokens (missing-text flag).
    pub empty_text: bool,
}

/// Embeds the first `min(len, max_len)` tokens column-wise; later tokens
/// are discarded and padding columns are exactly zero.
pub fn sequence_embed(
    tokens: &[String],
    embedder: &SubwordEmbedder,
    max_len: usize,
) -> Result<WordSequence> {
    let dim = embedder.dim;
    let keep = tokens.len().min(max_len);
    let mut matrix = Tensor::zeros(&[dim, max_len]);
    let mut ngram_ids = Vec::with_capacity(keep);
    let mut column = alloc::vec![0.0; dim];
    for (t, token) in tokens.iter().take(keep).enumerate() {
        let ids = embedder.hasher.bucket_ids(token)?;
        for v in &mut column {
            *v = 0.0;
        }
        embedder.accumulate_ids(&ids, &mut column);
        let data = matrix.data_mut();
        for (d, &v) in column.iter().enumerate() {
            data[d * max_len + t] = v;
        }
        ngram_ids.push(ids);
    }
    Ok(WordSequence {
        matrix,
        true_length: keep,
        max_len,
        ngram_ids,
        empty_text: tokens.is_empty(),
    })
}

impl WordSequence {
    /// All-zero sequence standing in for a document with no text.
    pub fn empty(dim: usize, max_len: usize) -> WordSequence {
        WordSequence {
            matrix: Tensor::zeros(&[dim, max_len]),
            true_length: 0,
            max_len,
            ngram_ids: Vec::new(),
            empty_text: true,
        }
    }
}
