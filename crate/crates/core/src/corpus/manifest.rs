use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{AtdsError, Result};
use crate::io;

#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceRecord {
    pub utt_id: String,
    /// Embedding file, relative to the manifest's directory.
    pub path: String,
    pub duration_s: f64,
    /// ISO-639-3 code.
    pub language: String,
}

impl UtteranceRecord {
    pub fn new(
        utt_id: impl Into<String>,
        path: impl Into<String>,
        duration_s: f64,
        language: impl Into<String>,
    ) -> Result<Self> {
        let rec = Self { utt_id: utt_id.into(), path: path.into(), duration_s, language: language.into() };
        if rec.utt_id.is_empty() {
            return Err(AtdsError::InvalidArgument("empty utt_id".into()));
        }
        if rec.path.is_empty() {
            return Err(AtdsError::InvalidArgument(format!("{}: empty path", rec.utt_id)));
        }
        if !(rec.duration_s.is_finite() && rec.duration_s > 0.0) {
            return Err(AtdsError::InvalidArgument(format!(
                "{}: duration must be > 0, got {}",
                rec.utt_id, rec.duration_s
            )));
        }
        Ok(rec)
    }
}

/// Ordered utterance list with unique ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorpusManifest {
    records: Vec<UtteranceRecord>,
    total_duration_s: f64,
}

impl CorpusManifest {
    pub fn new(records: Vec<UtteranceRecord>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(r.utt_id.as_str()) {
                return Err(AtdsError::DuplicateUttId(r.utt_id.clone()));
            }
        }
        let total_duration_s = records.iter().map(|r| r.duration_s).sum();
        Ok(Self { records, total_duration_s })
    }

    pub fn records(&self) -> &[UtteranceRecord] {
        &self.records
    }

    pub fn total_duration_s(&self) -> f64 {
        self.total_duration_s
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Language of the first record, if any.
    pub fn language(&self) -> Option<&str> {
        self.records.first().map(|r| r.language.as_str())
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            // `{}` on f64 prints the shortest representation that round-trips.
            writeln!(s, "{}\t{}\t{}\t{}", r.utt_id, r.path, r.duration_s, r.language).unwrap();
        }
        s
    }
}

pub fn load_manifest(path: &Path) -> Result<CorpusManifest> {
    let text = io::read_to_string(path)?;
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (line_no, line) in io::data_lines(&text) {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(AtdsError::parse(
                path,
                line_no,
                format!("expected 4 tab-separated columns, found {}", cols.len()),
            ));
        }
        let duration: f64 = cols[2]
            .trim()
            .parse()
            .map_err(|_| AtdsError::parse(path, line_no, format!("bad duration `{}`", cols[2])))?;
        let rec = UtteranceRecord::new(cols[0], cols[1], duration, cols[3])
            .map_err(|e| AtdsError::parse(path, line_no, e.to_string()))?;
        if !seen.insert(rec.utt_id.clone()) {
            return Err(AtdsError::DuplicateUttId(rec.utt_id));
        }
        records.push(rec);
    }
    if records.is_empty() {
        return Err(AtdsError::EmptyManifest);
    }
    CorpusManifest::new(records)
}

pub fn write_manifest(manifest: &CorpusManifest, path: &Path) -> Result<()> {
    io::write_atomic(path, manifest.to_tsv().as_bytes())
}
