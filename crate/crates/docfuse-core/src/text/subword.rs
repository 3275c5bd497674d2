//! Hashed character-n-gram word embeddings.
//!
//! Any token, including never-seen OCR garbage, maps to the mean of the
//! bucket vectors addressed by hashing its boundary-marked n-grams, so
//! out-of-vocabulary lookups can never fail and shared n-grams give
//! misspellings vectors close to the original word. Hashing is FNV-1a over
//! UTF-8 bytes with the seed folded into the offset basis, which is
//! bit-stable across platforms and processes.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::init::embedding_init;
use crate::rng::Rng;
use crate::tensor::Tensor;

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

/// 64-bit FNV-1a with the seed XORed into the offset basis.
pub fn fnv1a64(bytes: &[u8], seed: u64) -> u64 {
    let mut h = FNV_OFFSET ^ seed;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Boundary-marked character n-grams of `token` for lengths in
/// `[n_min, n_max]`, ordered by n then position, followed by the full
/// boundary-marked token when not already present.
pub fn char_ngrams(token: &str, n_min: usize, n_max: usize) -> Vec<String> {
    debug_assert!(n_min <= n_max && n_min >= 1);
    let mut marked: Vec<char> = Vec::with_capacity(token.chars().count() + 2);
    marked.push('<');
    marked.extend(token.chars());
    marked.push('>');
    let mut out = Vec::new();
    for n in n_min..=n_max {
        if n > marked.len() {
            break;
        }
        for window in marked.windows(n) {
            out.push(window.iter().collect::<String>());
        }
    }
    let full: String = marked.iter().collect();
    if !out.contains(&full) {
        out.push(full);
    }
    out
}

/// Hashing parameters; independent of any particular bucket table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubwordHasher {
    pub n_min: usize,
    pub n_max: usize,
    pub num_buckets: usize,
    pub hash_seed: u64,
}

impl SubwordHasher {
    pub fn new(n_min: usize, n_max: usize, num_buckets: usize, hash_seed: u64) -> Result<Self> {
        if n_min == 0 || n_min > n_max {
            return Err(Error::config(format!(
                "subword: need 1 <= n_min <= n_max, got [{n_min},{n_max}]"
            )));
        }
        if num_buckets == 0 {
            return Err(Error::config("subword: num_buckets must be >= 1"));
        }
        Ok(SubwordHasher {
            n_min,
            n_max,
            num_buckets,
            hash_seed,
        })
    }

    /// Bucket index of every n-gram of `token`, in n-gram order.
    pub fn bucket_ids(&self, token: &str) -> Result<Vec<u32>> {
        if token.is_empty() {
            return Err(Error::data("subword: cannot embed an empty token"));
        }
        Ok(char_ngrams(token, self.n_min, self.n_max)
            .iter()
            .map(|g| (fnv1a64(g.as_bytes(), self.hash_seed) % self.num_buckets as u64) as u32)
            .collect())
    }
}

/// Hashed bucket table mapping any token to a `dim`-wide vector.
#[derive(Debug, Clone)]
pub struct SubwordEmbedder {
    pub hasher: SubwordHasher,
    pub dim: usize,
    /// `[num_buckets, dim]`; a trainable parameter in the sequence model.
    pub table: Tensor,
}

impl SubwordEmbedder {
    /// Random table drawn from `normal(0, 1/sqrt(dim))`.
    pub fn random(hasher: SubwordHasher, dim: usize, rng: &mut Rng) -> SubwordEmbedder {
        let table = embedding_init(&[hasher.num_buckets, dim], dim, rng);
        SubwordEmbedder { hasher, dim, table }
    }

    pub fn from_table(hasher: SubwordHasher, dim: usize, table: Tensor) -> Result<SubwordEmbedder> {
        if table.shape() != [hasher.num_buckets, dim] {
            return Err(Error::shape(format!(
                "subword table: expected [{}, {}], got {:?}",
                hasher.num_buckets,
                dim,
                table.shape()
            )));
        }
        Ok(SubwordEmbedder { hasher, dim, table })
    }

    /// Mean of the addressed bucket vectors; total coverage over non-empty
    /// tokens by construction.
    pub fn embed_word(&self, token: &str) -> Result<Tensor> {
        let ids = self.hasher.bucket_ids(token)?;
        let mut v = Tensor::zeros(&[self.dim]);
        self.accumulate_ids(&ids, v.data_mut());
        Ok(v)
    }

    /// Writes the mean bucket vector for the given ids into `out`.
    pub fn accumulate_ids(&self, ids: &[u32], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        let inv = 1.0 / ids.len() as f64;
        let table = self.table.data();
        for &id in ids {
            let row = &table[id as usize * self.dim..(id as usize + 1) * self.dim];
            for (o, t) in out.iter_mut().zip(row.iter()) {
                *o += t * inv;
            }
        }
    }
}

/// Unit-norm vector seeded by `hash(token, seed)`: deterministic across
/// processes and platforms, distinct tokens land nearly orthogonal in high
/// dimension.
pub fn deterministic_oov_vector(token: &str, dim: usize, seed: u64) -> Tensor {
    debug_assert!(dim >= 1);
    let mut rng = Rng::from_seed(fnv1a64(token.as_bytes(), seed));
    let mut v = Tensor::zeros(&[dim]);
    for x in v.data_mut() {
        *x = rng.normal();
    }
    let norm = v.l2_norm();
    if norm < 1e-12 {
        v.data_mut()[0] = 1.0;
        return v;
    }
    v.scaled(1.0 / norm)
}
