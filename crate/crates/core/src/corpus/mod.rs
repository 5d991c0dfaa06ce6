//! Corpus bookkeeping: utterance manifests, the `.ate` embedding file format
//! and duration-based subset sampling.

mod embedding;
mod manifest;
mod sample;

pub use embedding::{read_embeddings, write_embeddings, EmbeddingMatrix, DEFAULT_FRAME_RATE_HZ};
pub use manifest::{load_manifest, write_manifest, CorpusManifest, UtteranceRecord};
pub use sample::sample_subset;

pub(crate) use embedding::{read_header_from as embedding_header, HEADER_LEN as EMBEDDING_HEADER_LEN};

use std::path::Path;

use crate::error::Result;

/// Tolerance for `verify_durations`, in seconds.
pub const DURATION_TOLERANCE_S: f64 = 0.1;

/// A manifest record whose embedding file disagrees with its declared duration.
#[derive(Debug, Clone, PartialEq)]
pub struct DurationMismatch {
    pub utt_id: String,
    pub declared_s: f64,
    pub measured_s: f64,
}

/// Cross-check every record's duration against `frames / frame_rate` of its
/// embedding file. Paths are resolved relative to `base_dir`.
pub fn verify_durations(manifest: &CorpusManifest, base_dir: &Path) -> Result<Vec<DurationMismatch>> {
    let mut out = Vec::new();
    for rec in manifest.records() {
        let m = read_embeddings(&base_dir.join(&rec.path))?;
        let measured = m.duration_s();
        if (measured - rec.duration_s).abs() > DURATION_TOLERANCE_S {
            out.push(DurationMismatch { utt_id: rec.utt_id.clone(), declared_s: rec.duration_s, measured_s: measured });
        }
    }
    Ok(out)
}
