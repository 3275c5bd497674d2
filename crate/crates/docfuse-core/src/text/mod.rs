//! Tokenization and word/document embeddings.

mod freq;
mod sequence;
mod sif;
mod subword;
mod tokenize;

pub use freq::{oov_rate, FrequencyTable};
pub use sequence::{sequence_embed, WordSequence, DEFAULT_MAX_LEN};
pub use sif::{first_principal_component, sif_embed, DocumentEmbedding, SifEmbedder};
pub use subword::{
    char_ngrams, deterministic_oov_vector, fnv1a64, SubwordEmbedder, SubwordHasher,
};
pub use tokenize::{join_tokens, tokenize, tokenize_bytes};
