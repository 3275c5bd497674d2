//! Smooth-inverse-frequency document embeddings with first principal
//! component removal.
//!
//! Per document: `v = (1/|doc|) * sum_w a/(a + p(w)) * embed(w)`, then the
//! dominant right singular direction `u` of the stacked document matrix is
//! removed: `v <- v - (u^T v) u`. `u` comes from power iteration on `X^T X`
//! with a fixed-seed start, so fitting is deterministic.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

use super::freq::FrequencyTable;
use super::subword::SubwordEmbedder;

const POWER_ITER_SEED: u64 = 0x51f_0001;
const POWER_ITERS: usize = 200;
const POWER_TOL: f64 = 1e-13;

/// A document vector; `is_empty` flags documents with no tokens (embedded
/// as the zero vector).
#[derive(Debug, Clone)]
pub struct DocumentEmbedding {
    pub vector: Tensor,
    pub is_empty: bool,
}

/// Dominant right singular direction of the row-major `rows x dim` matrix.
/// Returns a unit vector, or zero if the matrix is all zeros.
pub fn first_principal_component(matrix: &[f64], rows: usize, dim: usize) -> Tensor {
    debug_assert_eq!(matrix.len(), rows * dim);
    let mut u = Tensor::zeros(&[dim]);
    let mut rng = crate::rng::Rng::from_seed(POWER_ITER_SEED);
    for v in u.data_mut() {
        *v = rng.normal();
    }
    let norm = u.l2_norm();
    let mut u = u.scaled(1.0 / norm);
    let mut scratch = Vec::new();
    scratch.resize(rows, 0.0);
    for _ in 0..POWER_ITERS {
        // z = X u
        for (r, z) in scratch.iter_mut().enumerate() {
            let row = &matrix[r * dim..(r + 1) * dim];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(u.data().iter()) {
                acc += a * b;
            }
            *z = acc;
        }
        // next = X^T z
        let mut next = Tensor::zeros(&[dim]);
        {
            let nd = next.data_mut();
            for (r, &z) in scratch.iter().enumerate() {
                if z == 0.0 {
                    continue;
                }
                let row = &matrix[r * dim..(r + 1) * dim];
                for (n, &a) in nd.iter_mut().zip(row.iter()) {
                    *n += z * a;
                }
            }
        }
        let norm = next.l2_norm();
        if norm < 1e-300 {
            return Tensor::zeros(&[dim]);
        }
        let next = next.scaled(1.0 / norm);
        let delta = next.max_abs_diff(&u);
        u = next;
        if delta < POWER_TOL {
            break;
        }
    }
    u
}

/// Fitted SIF state: the weighting constant, training-corpus frequencies
/// and the principal direction to remove. Reused verbatim at inference so
/// evaluation embeds new documents consistently.
#[derive(Debug, Clone)]
pub struct SifEmbedder {
    pub a: f64,
    pub freq: FrequencyTable,
    pub pc: Tensor,
}

impl SifEmbedder {
    /// Weighted mean embedding before component removal.
    pub fn weighted_embedding(
        &self,
        tokens: &[String],
        embedder: &SubwordEmbedder,
    ) -> Result<(Tensor, bool)> {
        weighted_embedding(tokens, embedder, &self.freq, self.a)
    }

    /// Fits frequencies and the principal direction on a training corpus
    /// and returns the fitted state plus the corpus embeddings.
    pub fn fit(
        docs: &[Vec<String>],
        embedder: &SubwordEmbedder,
        a: f64,
    ) -> Result<(SifEmbedder, Vec<DocumentEmbedding>)> {
        let freq = FrequencyTable::from_docs(docs.iter().map(|d| d.as_slice()));
        let (embeddings, pc) = sif_embed(docs, embedder, &freq, a)?;
        Ok((SifEmbedder { a, freq, pc }, embeddings))
    }

    /// Embeds one document with the fitted state.
    pub fn embed(&self, tokens: &[String], embedder: &SubwordEmbedder) -> Result<DocumentEmbedding> {
        let (mut v, is_empty) = self.weighted_embedding(tokens, embedder)?;
        remove_component(&mut v, &self.pc);
        Ok(DocumentEmbedding { vector: v, is_empty })
    }
}

fn weighted_embedding(
    tokens: &[String],
    embedder: &SubwordEmbedder,
    freqs: &FrequencyTable,
    a: f64,
) -> Result<(Tensor, bool)> {
    let mut v = Tensor::zeros(&[embedder.dim]);
    if tokens.is_empty() {
        return Ok((v, true));
    }
    for token in tokens {
        let w = a / (a + freqs.probability(token));
        let ids = embedder.hasher.bucket_ids(token)?;
        let mut word = Tensor::zeros(&[embedder.dim]);
        embedder.accumulate_ids(&ids, word.data_mut());
        for (acc, x) in v.data_mut().iter_mut().zip(word.data().iter()) {
            *acc += w * x;
        }
    }
    let inv = 1.0 / tokens.len() as f64;
    for x in v.data_mut() {
        *x *= inv;
    }
    Ok((v, false))
}

fn remove_component(v: &mut Tensor, pc: &Tensor) {
    let proj: f64 = v
        .data()
        .iter()
        .zip(pc.data().iter())
        .map(|(a, b)| a * b)
        .sum();
    for (x, &u) in v.data_mut().iter_mut().zip(pc.data().iter()) {
        *x -= proj * u;
    }
}

/// Embeds a corpus: SIF weighting per document, then removal of the first
/// principal component of the stacked document matrix. Returns the
/// embeddings and the removed direction.
///
/// Empty documents yield flagged zero vectors; a corpus with no non-empty
/// document is a data error.
pub fn sif_embed(
    docs: &[Vec<String>],
    embedder: &SubwordEmbedder,
    freqs: &FrequencyTable,
    a: f64,
) -> Result<(Vec<DocumentEmbedding>, Tensor)> {
    if a <= 0.0 {
        return Err(Error::config(alloc::format!(
            "sif: weighting constant a must be > 0, got {a}"
        )));
    }
    if docs.iter().all(|d| d.is_empty()) {
        return Err(Error::data(
            "sif: corpus has no non-empty document",
        ));
    }
    let dim = embedder.dim;
    let mut embeddings = Vec::with_capacity(docs.len());
    let mut matrix = Vec::with_capacity(docs.len() * dim);
    for doc in docs {
        let (v, is_empty) = weighted_embedding(doc, embedder, freqs, a)?;
        matrix.extend_from_slice(v.data());
        embeddings.push(DocumentEmbedding { vector: v, is_empty });
    }
    let pc = first_principal_component(&matrix, docs.len(), dim);
    for doc in &mut embeddings {
        remove_component(&mut doc.vector, &pc);
    }
    Ok((embeddings, pc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::text::subword::SubwordHasher;
    use alloc::string::ToString;
    use alloc::vec;

    fn embedder(dim: usize, seed: u64) -> SubwordEmbedder {
        let hasher = SubwordHasher::new(3, 6, 500, 17).unwrap();
        SubwordEmbedder::random(hasher, dim, &mut Rng::from_seed(seed))
    }

    fn doc(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn unseen_word_gets_weight_one() {
        let emb = embedder(16, 1);
        let freqs = FrequencyTable::new();
        let (v, empty) =
            weighted_embedding(&doc(&["novelword"]), &emb, &freqs, 1e-3).unwrap();
        assert!(!empty);
        let direct = emb.embed_word("novelword").unwrap();
        // p(w) = 0 so the weight is exactly 1 and v equals embed(w).
        assert!(v.max_abs_diff(&direct) < 1e-15);
    }

    #[test]
    fn word_probability_equal_to_a_gets_weight_half() {
        let emb = embedder(8, 2);
        let mut freqs = FrequencyTable::new();
        // single token corpus: p(w) = 1; choose a = 1 so weight = 0.5
        freqs.add("word");
        let (v, _) = weighted_embedding(&doc(&["word"]), &emb, &freqs, 1.0).unwrap();
        let direct = emb.embed_word("word").unwrap();
        assert!(v.max_abs_diff(&direct.scaled(0.5)) < 1e-15);
    }

    // Exact oracle for two documents: the dominant eigenvector of the 2x2
    // Gram matrix G = X X^T lifts to the principal direction of X.
    fn pc_oracle_two_rows(matrix: &[f64], dim: usize) -> Tensor {
        let r0 = &matrix[..dim];
        let r1 = &matrix[dim..];
        let dot = |a: &[f64], b: &[f64]| -> f64 {
            a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
        };
        let (g00, g01, g11) = (dot(r0, r0), dot(r0, r1), dot(r1, r1));
        // largest eigenvalue of [[g00, g01], [g01, g11]]
        let tr = g00 + g11;
        let det = g00 * g11 - g01 * g01;
        let lam = 0.5 * (tr + crate::math::sqrt((tr * tr - 4.0 * det).max(0.0)));
        // eigenvector (alpha, beta) of G for lam
        let (alpha, beta) = if crate::math::abs(g01) > 1e-300 {
            (g01, lam - g00)
        } else if g00 >= g11 {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let mut u = Tensor::zeros(&[dim]);
        for (i, uv) in u.data_mut().iter_mut().enumerate() {
            *uv = alpha * r0[i] + beta * r1[i];
        }
        let n = u.l2_norm();
        u.scaled(1.0 / n)
    }

    #[test]
    fn identical_docs_collapse_to_zero_after_removal() {
        let emb = embedder(12, 3);
        let docs = vec![doc(&["alpha", "beta"]), doc(&["alpha", "beta"])];
        let freqs = FrequencyTable::from_docs(docs.iter().map(|d| d.as_slice()));
        let (vecs, pc) = sif_embed(&docs, &emb, &freqs, 1e-3).unwrap();
        for d in &vecs {
            assert!(d.vector.l2_norm() < 1e-10, "norm {}", d.vector.l2_norm());
        }
        // cross-check the removed direction against the 2-row eigen oracle
        let (w0, _) = weighted_embedding(&docs[0], &emb, &freqs, 1e-3).unwrap();
        let (w1, _) = weighted_embedding(&docs[1], &emb, &freqs, 1e-3).unwrap();
        let mut matrix = w0.data().to_vec();
        matrix.extend_from_slice(w1.data());
        let want = pc_oracle_two_rows(&matrix, 12);
        let align = crate::math::abs(crate::math::cosine(pc.data(), want.data()));
        assert!(align > 1.0 - 1e-9, "alignment {align}");
    }

    #[test]
    fn power_iteration_matches_two_row_eigen_oracle() {
        let mut rng = Rng::from_seed(77);
        let dim = 10;
        let mut matrix = vec![0.0; 2 * dim];
        for v in &mut matrix {
            *v = rng.normal();
        }
        let got = first_principal_component(&matrix, 2, dim);
        let want = pc_oracle_two_rows(&matrix, dim);
        let align = crate::math::abs(crate::math::cosine(got.data(), want.data()));
        assert!(align > 1.0 - 1e-9, "alignment {align}");
    }

    #[test]
    fn removal_leaves_no_projection_on_pc() {
        let emb = embedder(24, 4);
        let docs: Vec<Vec<String>> = (0..20)
            .map(|i| doc(&[["report", "memo", "email", "form"][i % 4], "common"]))
            .collect();
        let freqs = FrequencyTable::from_docs(docs.iter().map(|d| d.as_slice()));
        let (vecs, pc) = sif_embed(&docs, &emb, &freqs, 1e-3).unwrap();
        for d in &vecs {
            let proj: f64 = d
                .vector
                .data()
                .iter()
                .zip(pc.data().iter())
                .map(|(a, b)| a * b)
                .sum();
            assert!(crate::math::abs(proj) < 1e-8, "projection {proj}");
        }
    }

    #[test]
    fn empty_doc_is_flagged_all_empty_corpus_errors() {
        let emb = embedder(8, 5);
        let docs = vec![doc(&["word"]), doc(&[])];
        let freqs = FrequencyTable::from_docs(docs.iter().map(|d| d.as_slice()));
        let (vecs, _) = sif_embed(&docs, &emb, &freqs, 1e-3).unwrap();
        assert!(!vecs[0].is_empty);
        assert!(vecs[1].is_empty);

        let all_empty = vec![doc(&[]), doc(&[])];
        assert!(matches!(
            sif_embed(&all_empty, &emb, &freqs, 1e-3).unwrap_err(),
            Error::Data(_)
        ));
    }

    #[test]
    fn sif_is_token_order_invariant() {
        let emb = embedder(16, 6);
        let d1 = doc(&["alpha", "beta", "gamma"]);
        let d2 = doc(&["gamma", "alpha", "beta"]);
        let freqs = FrequencyTable::from_docs([d1.as_slice(), d2.as_slice()]);
        let (v1, _) = weighted_embedding(&d1, &emb, &freqs, 1e-3).unwrap();
        let (v2, _) = weighted_embedding(&d2, &emb, &freqs, 1e-3).unwrap();
        assert!(v1.max_abs_diff(&v2) < 1e-12);
    }
}
