use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{AtdsError, Result};
use crate::io;
use crate::tokenizer::{SubwordVocab, TokenSequence};

/// Token occurrence counts of one corpus under a specific vocab.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenDistribution {
    pub language: String,
    pub vocab_fingerprint: u64,
    /// Dense, indexed by token id.
    pub counts: Vec<u64>,
    pub total: u64,
}

impl TokenDistribution {
    pub fn from_counts(language: impl Into<String>, vocab_fingerprint: u64, counts: Vec<u64>) -> Result<Self> {
        let total = counts.iter().sum();
        Ok(Self { language: language.into(), vocab_fingerprint, counts, total })
    }

    /// Element-wise sum; both sides must come from the same vocab.
    pub fn merge(&mut self, other: &TokenDistribution) -> Result<()> {
        if self.vocab_fingerprint != other.vocab_fingerprint {
            return Err(AtdsError::FingerprintMismatch(self.vocab_fingerprint, other.vocab_fingerprint));
        }
        if self.counts.len() != other.counts.len() {
            return Err(AtdsError::LengthMismatch(self.counts.len(), other.counts.len()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }

    pub fn relative_frequencies(&self) -> Vec<f64> {
        let t = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }

    pub fn to_json(&self) -> String {
        let file = DistributionFile {
            language: self.language.clone(),
            vocab_fingerprint: format!("{:016x}", self.vocab_fingerprint),
            vocab_len: self.counts.len(),
            total: self.total,
            counts: self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i as u32, c)).collect(),
            frequencies: self
                .relative_frequencies()
                .into_iter()
                .enumerate()
                .filter(|(_, f)| *f > 0.0)
                .map(|(i, f)| (i as u32, f))
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("distribution serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: DistributionFile = serde_json::from_str(text)?;
        let fingerprint = u64::from_str_radix(&f.vocab_fingerprint, 16)
            .map_err(|_| AtdsError::InvalidArgument(format!("bad fingerprint {:?}", f.vocab_fingerprint)))?;
        let mut counts = vec![0u64; f.vocab_len];
        for (id, c) in f.counts {
            *counts
                .get_mut(id as usize)
                .ok_or_else(|| AtdsError::InvalidArgument(format!("token id {id} >= vocab_len {}", f.vocab_len)))? = c;
        }
        let d = Self::from_counts(f.language, fingerprint, counts)?;
        if d.total != f.total {
            return Err(AtdsError::InvalidArgument(format!(
                "declared total {} but counts sum to {}",
                f.total, d.total
            )));
        }
        Ok(d)
    }
}

#[derive(Serialize, Deserialize)]
struct DistributionFile {
    language: String,
    vocab_fingerprint: String,
    vocab_len: usize,
    total: u64,
    counts: BTreeMap<u32, u64>,
    /// Informational; ignored when reading.
    #[serde(default)]
    frequencies: BTreeMap<u32, f64>,
}

/// Count token occurrences across all sequences.
pub fn token_distribution(
    sequences: &[TokenSequence],
    vocab: &SubwordVocab,
    language: &str,
) -> Result<TokenDistribution> {
    let mut counts = vec![0u64; vocab.len()];
    for seq in sequences {
        for &id in &seq.ids {
            *counts.get_mut(id as usize).ok_or_else(|| {
                AtdsError::InvalidArgument(format!("{}: token id {id} not in vocab of {}", seq.utt_id, vocab.len()))
            })? += 1;
        }
    }
    let d = TokenDistribution::from_counts(language, vocab.fingerprint(), counts)?;
    if d.total == 0 {
        return Err(AtdsError::EmptyInput("token distribution with zero total"));
    }
    Ok(d)
}

pub fn write_distribution(dist: &TokenDistribution, path: &Path) -> Result<()> {
    io::write_atomic(path, dist.to_json().as_bytes())
}

pub fn read_distribution(path: &Path) -> Result<TokenDistribution> {
    TokenDistribution::from_json(&io::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::{train_subword_with, CharString, SubwordOptions};

    fn vocab() -> SubwordVocab {
        let opts = SubwordOptions { vocab_size: 8, k: 3, base_codepoint: 'a' as u32, min_frequency: 1 };
        train_subword_with(&[CharString::new("u", "abcab")], &opts).unwrap()
    }

    fn seq(ids: &[u32]) -> TokenSequence {
        TokenSequence { utt_id: "u".into(), ids: ids.to_vec() }
    }

    #[test]
    fn counts_occurrences() {
        let v = vocab();
        let d = token_distribution(&[seq(&[1, 2]), seq(&[2])], &v, "pan").unwrap();
        assert_eq!(d.counts[1], 1);
        assert_eq!(d.counts[2], 2);
        assert_eq!(d.total, 3);
        assert_eq!(d.counts.len(), v.len());
        assert_eq!(d.vocab_fingerprint, v.fingerprint());
    }

    #[test]
    fn zero_total_rejected() {
        assert!(matches!(token_distribution(&[seq(&[])], &vocab(), "pan"), Err(AtdsError::EmptyInput(_))));
    }

    #[test]
    fn invalid_id_rejected() {
        assert!(token_distribution(&[seq(&[99])], &vocab(), "pan").is_err());
    }

    #[test]
    fn additivity() {
        let v = vocab();
        let s1 = vec![seq(&[1, 2, 3]), seq(&[3, 3])];
        let s2 = vec![seq(&[2, 4]), seq(&[1])];
        let mut merged = token_distribution(&s1, &v, "x").unwrap();
        merged.merge(&token_distribution(&s2, &v, "x").unwrap()).unwrap();
        let all: Vec<_> = s1.into_iter().chain(s2).collect();
        assert_eq!(token_distribution(&all, &v, "x").unwrap(), merged);
    }

    #[test]
    fn json_round_trip() {
        let d = TokenDistribution::from_counts("pan", 0xdead_beef_0000_0001, vec![0, 4, 0, 1]).unwrap();
        let json = d.to_json();
        assert!(json.contains("\"vocab_fingerprint\": \"deadbeef00000001\""));
        assert!(json.contains("\"1\": 4"));
        assert!(json.contains("\"1\": 0.8"));
        assert_eq!(TokenDistribution::from_json(&json).unwrap(), d);
        let tampered = json.replace("\"total\": 5", "\"total\": 6");
        assert!(TokenDistribution::from_json(&tampered).is_err());
    }
}
