use super::{SubwordVocab, TokenSequence};
use crate::error::{AtdsError, Result};

/// Time extent of one token, on left-aligned frame boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenSpan {
    pub token_id: u32,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceSpans {
    pub utt_id: String,
    pub spans: Vec<TokenSpan>,
}

/// Map each token back to the frames of the character runs it covers.
///
/// `run_lengths` are the per-character frame counts from deduplication.
/// Boundaries are `frame_index / frame_rate_hz`, so the spans tile
/// `[0, total_frames / frame_rate_hz)`.
pub fn token_spans(
    vocab: &SubwordVocab,
    seq: &TokenSequence,
    run_lengths: &[u32],
    frame_rate_hz: f64,
) -> Result<Vec<TokenSpan>> {
    if !(frame_rate_hz.is_finite() && frame_rate_hz > 0.0) {
        return Err(AtdsError::InvalidArgument(format!("frame rate must be > 0, got {frame_rate_hz}")));
    }
    if run_lengths.contains(&0) {
        return Err(AtdsError::SpanBookkeeping("zero-length run".into()));
    }
    let mut spans = Vec::with_capacity(seq.ids.len());
    let mut runs = run_lengths.iter();
    let mut frame: u64 = 0;
    for &id in &seq.ids {
        let n = vocab.char_len(id).ok_or_else(|| AtdsError::SpanBookkeeping(format!("token id {id} not in vocab")))?;
        let start = frame;
        for _ in 0..n {
            let r = runs.next().ok_or_else(|| {
                AtdsError::SpanBookkeeping(format!("{}: tokens cover more characters than runs", seq.utt_id))
            })?;
            frame += *r as u64;
        }
        spans.push(TokenSpan {
            token_id: id,
            start_s: start as f64 / frame_rate_hz,
            end_s: frame as f64 / frame_rate_hz,
        });
    }
    if runs.next().is_some() {
        return Err(AtdsError::SpanBookkeeping(format!("{}: runs cover more characters than tokens", seq.utt_id)));
    }
    Ok(spans)
}
