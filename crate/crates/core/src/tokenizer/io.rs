use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{SubwordVocab, TokenSequence, TokenSpan, UtteranceSpans};
use crate::error::{AtdsError, Result};
use crate::io;

pub fn write_vocab(vocab: &SubwordVocab, path: &Path) -> Result<()> {
    io::write_atomic(path, vocab.to_json().as_bytes())
}

pub fn read_vocab(path: &Path) -> Result<SubwordVocab> {
    SubwordVocab::from_json(&io::read_to_string(path)?)
}

/// One line per utterance: `utt_id<TAB>space-separated token ids`.
pub fn write_token_sequences(seqs: &[TokenSequence], path: &Path) -> Result<()> {
    let mut s = String::new();
    for seq in seqs {
        s.push_str(&seq.utt_id);
        s.push('\t');
        for (i, id) in seq.ids.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            write!(s, "{id}").unwrap();
        }
        s.push('\n');
    }
    io::write_atomic(path, s.as_bytes())
}

pub fn read_token_sequences(path: &Path) -> Result<Vec<TokenSequence>> {
    let text = io::read_to_string(path)?;
    io::data_lines(&text)
        .map(|(line_no, line)| {
            let (utt_id, rest) = line
                .split_once('\t')
                .ok_or_else(|| AtdsError::parse(path, line_no, "expected utt_id<TAB>token ids"))?;
            let ids = rest
                .split_ascii_whitespace()
                .map(str::parse)
                .collect::<Result<Vec<u32>, _>>()
                .map_err(|e| AtdsError::parse(path, line_no, e.to_string()))?;
            Ok(TokenSequence { utt_id: utt_id.to_string(), ids })
        })
        .collect()
}

/// Rows of `utt_id<TAB>token_id<TAB>start_s<TAB>end_s`.
pub fn write_spans(utts: &[UtteranceSpans], path: &Path) -> Result<()> {
    let mut s = String::new();
    for u in utts {
        for sp in &u.spans {
            writeln!(s, "{}\t{}\t{}\t{}", u.utt_id, sp.token_id, sp.start_s, sp.end_s).unwrap();
        }
    }
    io::write_atomic(path, s.as_bytes())
}

/// Spans grouped by utterance, in file order within each utterance.
pub fn read_spans(path: &Path) -> Result<BTreeMap<String, Vec<TokenSpan>>> {
    let text = io::read_to_string(path)?;
    let mut out: BTreeMap<String, Vec<TokenSpan>> = BTreeMap::new();
    for (line_no, line) in io::data_lines(&text) {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(AtdsError::parse(path, line_no, "expected utt_id, token_id, start_s, end_s"));
        }
        let bad = |what: &str| AtdsError::parse(path, line_no, format!("bad {what}"));
        let span = TokenSpan {
            token_id: cols[1].parse().map_err(|_| bad("token id"))?,
            start_s: cols[2].parse().map_err(|_| bad("start"))?,
            end_s: cols[3].parse().map_err(|_| bad("end"))?,
        };
        if !(span.start_s >= 0.0 && span.start_s < span.end_s) {
            return Err(AtdsError::parse(path, line_no, "span must satisfy 0 <= start < end"));
        }
        out.entry(cols[0].to_string()).or_default().push(span);
    }
    Ok(out)
}
