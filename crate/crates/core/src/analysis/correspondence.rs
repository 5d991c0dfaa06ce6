use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{AtdsError, Result};
use crate::io;
use crate::tokenizer::TokenSpan;

/// Label for frames not covered by any phone interval.
pub const NO_PHONE: &str = "∅";

const OVERLAP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhoneInterval {
    pub start_s: f64,
    pub end_s: f64,
    pub phone: String,
}

/// Reads `utt_id<TAB>start_s<TAB>end_s<TAB>phone` rows. Intervals are sorted
/// per utterance and must not overlap.
pub fn read_phone_intervals(path: &Path) -> Result<BTreeMap<String, Vec<PhoneInterval>>> {
    let text = io::read_to_string(path)?;
    let mut out: BTreeMap<String, Vec<PhoneInterval>> = BTreeMap::new();
    for (line_no, line) in io::data_lines(&text) {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(AtdsError::parse(path, line_no, format!("expected 4 columns, found {}", cols.len())));
        }
        let num = |s: &str, what: &str| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| AtdsError::parse(path, line_no, format!("bad {what} '{s}'")))
        };
        let start_s = num(cols[1], "start")?;
        let end_s = num(cols[2], "end")?;
        if !(start_s >= 0.0 && start_s < end_s) {
            return Err(AtdsError::MalformedInterval(format!("{}: [{start_s}, {end_s}) at line {line_no}", cols[0])));
        }
        out.entry(cols[0].to_string()).or_default().push(PhoneInterval { start_s, end_s, phone: cols[3].to_string() });
    }
    for (utt, ivs) in out.iter_mut() {
        check_intervals(utt, ivs)?;
    }
    Ok(out)
}

fn check_intervals(utt: &str, ivs: &mut [PhoneInterval]) -> Result<()> {
    ivs.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
    for iv in ivs.iter() {
        if !(iv.start_s >= 0.0 && iv.start_s < iv.end_s) {
            return Err(AtdsError::MalformedInterval(format!("{utt}: [{}, {})", iv.start_s, iv.end_s)));
        }
    }
    for w in ivs.windows(2) {
        if w[0].end_s > w[1].start_s + OVERLAP_EPS {
            return Err(AtdsError::MalformedInterval(format!(
                "{utt}: [{}, {}) overlaps [{}, {})",
                w[0].start_s, w[0].end_s, w[1].start_s, w[1].end_s
            )));
        }
    }
    Ok(())
}

/// Frame-level co-occurrence of subword tokens and phones.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorrespondenceTable {
    /// token id -> phone -> number of frames.
    pub frames: BTreeMap<u32, BTreeMap<String, u64>>,
    /// token id -> number of spans.
    pub occurrences: BTreeMap<u32, u64>,
}

impl CorrespondenceTable {
    /// P(phone | token) over the token's frames.
    pub fn distribution(&self, token_id: u32) -> Vec<(String, f64)> {
        let Some(row) = self.frames.get(&token_id) else { return Vec::new() };
        let total: u64 = row.values().sum();
        let mut v: Vec<(String, f64)> = row.iter().map(|(p, &c)| (p.clone(), c as f64 / total as f64)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        v
    }

    /// Token ids by span count, most frequent first.
    pub fn ranked_tokens(&self) -> Vec<u32> {
        let mut ids: Vec<(u32, u64)> = self.occurrences.iter().map(|(&t, &c)| (t, c)).collect();
        ids.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        ids.into_iter().map(|(t, _)| t).collect()
    }

    /// Lines like `P(/a/|t1) = 0.69`, where `tN` is the frequency rank.
    pub fn render(&self, top_tokens: usize, top_phones: usize) -> String {
        let mut out = String::new();
        for (rank, t) in self.ranked_tokens().into_iter().take(top_tokens).enumerate() {
            for (phone, p) in self.distribution(t).into_iter().take(top_phones) {
                let _ = writeln!(out, "P(/{phone}/|t{}) = {p:.2}", rank + 1);
            }
        }
        out
    }

    /// `rank<TAB>token_id<TAB>phone<TAB>frames<TAB>probability` rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("rank\ttoken_id\tphone\tframes\tprobability\n");
        for (rank, t) in self.ranked_tokens().into_iter().enumerate() {
            let row = &self.frames[&t];
            for (phone, p) in self.distribution(t) {
                let _ = writeln!(out, "{}\t{t}\t{phone}\t{}\t{p}", rank + 1, row[&phone]);
            }
        }
        out
    }
}

/// Attributes each frame of each token span to the phone interval with the
/// largest overlap, earlier interval on ties.
pub fn phone_token_correspondence(
    spans: &BTreeMap<String, Vec<TokenSpan>>,
    phones: &BTreeMap<String, Vec<PhoneInterval>>,
    frame_rate_hz: f64,
) -> Result<CorrespondenceTable> {
    if !(frame_rate_hz.is_finite() && frame_rate_hz > 0.0) {
        return Err(AtdsError::InvalidArgument(format!("frame rate must be > 0, got {frame_rate_hz}")));
    }
    let mut table = CorrespondenceTable::default();
    let empty = Vec::new();
    for (utt, utt_spans) in spans {
        let mut ivs = phones.get(utt).cloned().unwrap_or_default();
        if ivs.is_empty() {
            log::warn!("no phone intervals for {utt}");
        }
        check_intervals(utt, &mut ivs)?;
        let ivs = if ivs.is_empty() { &empty } else { &ivs };
        for span in utt_spans {
            let first = (span.start_s * frame_rate_hz).round() as i64;
            let last = (span.end_s * frame_rate_hz).round() as i64;
            if first < 0 || last <= first {
                return Err(AtdsError::MalformedInterval(format!("{utt}: span [{}, {})", span.start_s, span.end_s)));
            }
            *table.occurrences.entry(span.token_id).or_default() += 1;
            let row = table.frames.entry(span.token_id).or_default();
            for f in first..last {
                let fs = f as f64 / frame_rate_hz;
                let fe = (f + 1) as f64 / frame_rate_hz;
                let phone = best_phone(ivs, fs, fe).unwrap_or(NO_PHONE);
                *row.entry(phone.to_string()).or_default() += 1;
            }
        }
    }
    Ok(table)
}

fn best_phone(ivs: &[PhoneInterval], fs: f64, fe: f64) -> Option<&str> {
    let from = ivs.partition_point(|iv| iv.end_s <= fs);
    let mut best: Option<(&str, f64)> = None;
    for iv in ivs[from..].iter().take_while(|iv| iv.start_s < fe) {
        let overlap = iv.end_s.min(fe) - iv.start_s.max(fs);
        if overlap <= 0.0 {
            continue;
        }
        if best.is_none_or(|(_, b)| overlap > b + OVERLAP_EPS) {
            best = Some((&iv.phone, overlap));
        }
    }
    best.map(|(p, _)| p)
}
