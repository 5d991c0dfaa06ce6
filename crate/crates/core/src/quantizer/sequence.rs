use std::fmt::Write as _;
use std::path::Path;

use crate::error::{AtdsError, Result};
use crate::io;

/// Per-frame cluster labels of one utterance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSequence {
    pub utt_id: String,
    pub indices: Vec<u32>,
}

/// One line per utterance: `utt_id<TAB>space-separated indices`.
pub fn write_cluster_sequences(seqs: &[ClusterSequence], path: &Path) -> Result<()> {
    let mut s = String::new();
    for seq in seqs {
        s.push_str(&seq.utt_id);
        s.push('\t');
        for (i, x) in seq.indices.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            write!(s, "{x}").unwrap();
        }
        s.push('\n');
    }
    io::write_atomic(path, s.as_bytes())
}

pub fn read_cluster_sequences(path: &Path) -> Result<Vec<ClusterSequence>> {
    let text = io::read_to_string(path)?;
    io::data_lines(&text)
        .map(|(line_no, line)| {
            let (utt_id, rest) =
                line.split_once('\t').ok_or_else(|| AtdsError::parse(path, line_no, "expected utt_id<TAB>indices"))?;
            let indices = rest
                .split_ascii_whitespace()
                .map(|t| t.parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| AtdsError::parse(path, line_no, e.to_string()))?;
            Ok(ClusterSequence { utt_id: utt_id.to_string(), indices })
        })
        .collect()
}
