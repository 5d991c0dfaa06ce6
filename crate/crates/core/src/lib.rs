//! Acoustic token distribution similarity (ATDS).
//!
//! Induces pseudo-tokens from untranscribed speech embeddings (k-means
//! quantization, character mapping, run-length deduplication, byte-pair
//! subword merges) and compares corpora by the cosine similarity of their
//! token frequency vectors. Also provides baseline similarity measures and
//! the evaluation arithmetic used to relate similarity to downstream ASR
//! gains: WER, WERR, Pearson correlation, donor ranking and token/phone
//! correspondence.

pub mod analysis;
pub mod config;
pub mod corpus;
pub mod error;
pub mod fingerprint;
pub mod io;
pub mod pipeline;
pub mod quantizer;
pub mod rng;
pub mod similarity;
pub mod tokenizer;

pub use error::{AtdsError, Result};
