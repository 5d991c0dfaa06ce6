//! Cluster sequences to acoustic pseudo-tokens: each cluster index becomes
//! one Unicode character, repeated characters collapse into runs, and a
//! byte-pair style subword model merges frequent character sequences.

mod bpe;
mod io;
mod spans;

pub use bpe::{train_subword, train_subword_with, SubwordOptions, SubwordVocab, TokenSequence, UNK_ID, UNK_TOKEN};
pub use io::{read_spans, read_token_sequences, read_vocab, write_spans, write_token_sequences, write_vocab};
pub use spans::{token_spans, TokenSpan, UtteranceSpans};

use crate::error::{AtdsError, Result};
use crate::quantizer::ClusterSequence;

/// First codepoint of the CJK Unified Ideographs block: 20,992 contiguous
/// printable, non-whitespace scalar values.
pub const DEFAULT_BASE_CODEPOINT: u32 = 0x4E00;

/// Cluster labels of one utterance rendered as characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharString {
    pub utt_id: String,
    pub chars: Vec<char>,
}

impl CharString {
    pub fn new(utt_id: impl Into<String>, text: &str) -> Self {
        Self { utt_id: utt_id.into(), chars: text.chars().collect() }
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn as_string(&self) -> String {
        self.chars.iter().collect()
    }
}

/// A deduplicated string plus the number of frames each character covered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deduped {
    pub string: CharString,
    pub run_lengths: Vec<u32>,
}

/// Check that `[base, base + k)` is a non-empty run of Unicode scalar values.
pub fn validate_codepoint_range(base: u32, k: usize) -> Result<()> {
    let err = || AtdsError::InvalidCodepointRange { base, k };
    if k == 0 {
        return Err(err());
    }
    let last = (base as u64) + (k as u64) - 1;
    if last > char::MAX as u64 {
        return Err(err());
    }
    let last = last as u32;
    // Surrogates 0xD800..=0xDFFF are not scalar values.
    if base <= 0xDFFF && last >= 0xD800 {
        return Err(err());
    }
    Ok(())
}

pub(crate) fn index_to_char(base: u32, index: u32) -> char {
    char::from_u32(base + index).expect("codepoint range validated")
}

pub fn clusters_to_chars(seq: &ClusterSequence, base_codepoint: u32, k: usize) -> Result<CharString> {
    validate_codepoint_range(base_codepoint, k)?;
    let chars = seq
        .indices
        .iter()
        .map(|&i| {
            if (i as usize) < k {
                Ok(index_to_char(base_codepoint, i))
            } else {
                Err(AtdsError::IndexOutOfRange { index: i, k })
            }
        })
        .collect::<Result<_>>()?;
    Ok(CharString { utt_id: seq.utt_id.clone(), chars })
}

/// Collapse maximal runs of equal characters, recording each run's length.
pub fn dedup(s: &CharString) -> Deduped {
    let mut chars = Vec::new();
    let mut run_lengths: Vec<u32> = Vec::new();
    for &c in &s.chars {
        if chars.last() == Some(&c) {
            *run_lengths.last_mut().unwrap() += 1;
        } else {
            chars.push(c);
            run_lengths.push(1);
        }
    }
    Deduped { string: CharString { utt_id: s.utt_id.clone(), chars }, run_lengths }
}
