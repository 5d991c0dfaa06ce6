//! Corpus similarity measures.
//!
//! ATDS is the cosine between two acoustic-token count vectors produced with
//! the same (target-trained) vocab. The baselines compare corpus-mean
//! utterance embeddings or externally supplied per-language feature vectors.

mod distribution;

pub use distribution::{read_distribution, token_distribution, write_distribution, TokenDistribution};

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{AtdsError, Result};
use crate::io;
use crate::tokenizer::UNK_ID;

/// Flag attached when two feature vectors are bitwise identical, which in
/// typological databases usually means both were imputed.
pub const SUSPECT_IMPUTATION: &str = "suspect-imputation";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "ATDS")]
    Atds,
    MeanEmbedding,
    FeatureVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub target: String,
    pub donor: String,
    pub metric: Metric,
    pub value: f64,
    #[serde(default)]
    pub flags: Vec<String>,
}

impl SimilarityScore {
    fn unlabeled(metric: Metric, value: f64) -> Self {
        Self { target: String::new(), donor: String::new(), metric, value, flags: Vec::new() }
    }

    pub fn between(mut self, target: impl Into<String>, donor: impl Into<String>) -> Self {
        self.target = target.into();
        self.donor = donor.into();
        self
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }
}

/// `dot(u, v) / (|u| |v|)` in double precision, clamped to `[-1, 1]`.
/// Exactly symmetric in its arguments.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(AtdsError::LengthMismatch(u.len(), v.len()));
    }
    let mut dot = 0.0;
    let mut uu = 0.0;
    let mut vv = 0.0;
    for (&a, &b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(AtdsError::ZeroVector);
    }
    // sqrt(fl(x * x)) == x exactly, so cosine(v, v) is exactly 1.
    Ok((dot / (uu * vv).sqrt()).clamp(-1.0, 1.0))
}

/// Acoustic token distribution similarity. UNK counts are left out.
pub fn atds(target: &TokenDistribution, donor: &TokenDistribution) -> Result<SimilarityScore> {
    if target.vocab_fingerprint != donor.vocab_fingerprint {
        return Err(AtdsError::FingerprintMismatch(target.vocab_fingerprint, donor.vocab_fingerprint));
    }
    if target.total == 0 || donor.total == 0 {
        return Err(AtdsError::EmptyInput("token distribution with zero total"));
    }
    let skip = UNK_ID as usize + 1;
    let u: Vec<f64> = target.counts.iter().skip(skip).map(|&c| c as f64).collect();
    let v: Vec<f64> = donor.counts.iter().skip(skip).map(|&c| c as f64).collect();
    Ok(SimilarityScore::unlabeled(Metric::Atds, cosine(&u, &v)?).between(&target.language, &donor.language))
}

fn mean_of(vectors: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = vectors.first().ok_or(AtdsError::EmptyInput("utterance embedding list"))?;
    let mut acc = vec![0.0; first.len()];
    for v in vectors {
        if v.len() != acc.len() {
            return Err(AtdsError::DimensionMismatch { expected: acc.len(), actual: v.len() });
        }
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    let n = vectors.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(acc)
}

/// Cosine between the corpus-level means of utterance-level embeddings.
pub fn mean_embedding_similarity(utt_means_a: &[Vec<f64>], utt_means_b: &[Vec<f64>]) -> Result<SimilarityScore> {
    let a = mean_of(utt_means_a)?;
    let b = mean_of(utt_means_b)?;
    if a.len() != b.len() {
        return Err(AtdsError::DimensionMismatch { expected: a.len(), actual: b.len() });
    }
    Ok(SimilarityScore::unlabeled(Metric::MeanEmbedding, cosine(&a, &b)?))
}

/// Cosine between two precomputed feature vectors. Bitwise-identical inputs
/// are flagged [`SUSPECT_IMPUTATION`] when `flag_identical` is set.
pub fn feature_vector_similarity(vec_a: &[f64], vec_b: &[f64], flag_identical: bool) -> Result<SimilarityScore> {
    let mut s = SimilarityScore::unlabeled(Metric::FeatureVector, cosine(vec_a, vec_b)?);
    let identical = vec_a.iter().zip(vec_b).all(|(a, b)| a.to_bits() == b.to_bits());
    if flag_identical && identical {
        s.flags.push(SUSPECT_IMPUTATION.to_string());
    }
    Ok(s)
}

/// Per-language feature vectors: `language<TAB>space-separated values`.
pub fn read_feature_vectors(path: &Path) -> Result<BTreeMap<String, Vec<f64>>> {
    let text = io::read_to_string(path)?;
    let mut out = BTreeMap::new();
    for (line_no, line) in io::data_lines(&text) {
        let (lang, rest) =
            line.split_once('\t').ok_or_else(|| AtdsError::parse(path, line_no, "expected language<TAB>values"))?;
        let values = rest
            .split_ascii_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| AtdsError::parse(path, line_no, e.to_string()))?;
        if out.insert(lang.to_string(), values).is_some() {
            return Err(AtdsError::parse(path, line_no, format!("duplicate language {lang}")));
        }
    }
    Ok(out)
}

pub fn scores_to_json(scores: &[SimilarityScore]) -> String {
    let mut s = serde_json::to_string_pretty(scores).expect("scores serialize");
    s.push('\n');
    s
}

pub fn write_scores(scores: &[SimilarityScore], path: &Path) -> Result<()> {
    io::write_atomic(path, scores_to_json(scores).as_bytes())
}

pub fn read_scores(path: &Path) -> Result<Vec<SimilarityScore>> {
    Ok(serde_json::from_str(&io::read_to_string(path)?)?)
}
