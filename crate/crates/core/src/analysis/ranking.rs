use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::stats::{format_werr, pearson, werr};
use crate::error::{AtdsError, Result};
use crate::io;

/// A donor candidate with its similarity score and, optionally, the WER
/// measured after fine-tuning on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DonorEntry {
    pub donor: String,
    #[serde(alias = "value")]
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wer: Option<f64>,
}

impl DonorEntry {
    pub fn new(donor: impl Into<String>, score: f64, wer: Option<f64>) -> Self {
        Self { donor: donor.into(), score, wer }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedDonor {
    pub rank: usize,
    pub donor: String,
    pub score: f64,
    pub wer: Option<f64>,
    /// Percent improvement over the baseline.
    pub werr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DonorReport {
    pub baseline_wer: Option<f64>,
    pub donors: Vec<RankedDonor>,
    /// Correlation between score and WERR across the entries that have both.
    pub pearson_r: Option<f64>,
}

/// Sort donors by score, highest first, breaking ties by donor name.
pub fn rank_donors(entries: &[DonorEntry], baseline_wer: Option<f64>) -> Result<DonorReport> {
    for e in entries {
        if !e.score.is_finite() {
            return Err(AtdsError::InvalidArgument(format!("non-finite score for {}", e.donor)));
        }
        if let Some(w) = e.wer {
            if !(w.is_finite() && w >= 0.0) {
                return Err(AtdsError::InvalidArgument(format!("invalid WER {w} for {}", e.donor)));
            }
        }
    }
    let mut sorted: Vec<&DonorEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(Ordering::Equal).then_with(|| a.donor.cmp(&b.donor)));

    let mut donors = Vec::with_capacity(sorted.len());
    for (i, e) in sorted.into_iter().enumerate() {
        let werr = match (baseline_wer, e.wer) {
            (Some(b), Some(w)) => Some(werr(b, w)?),
            _ => None,
        };
        donors.push(RankedDonor { rank: i + 1, donor: e.donor.clone(), score: e.score, wer: e.wer, werr });
    }

    let (xs, ys): (Vec<f64>, Vec<f64>) = donors.iter().filter_map(|d| d.werr.map(|w| (d.score, w))).unzip();
    let pearson_r = if xs.len() >= 2 {
        match pearson(&xs, &ys) {
            Ok(r) => Some(r),
            Err(AtdsError::ZeroVariance) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(DonorReport { baseline_wer, donors, pearson_r })
}

impl DonorReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("donor\tscore\twer\twerr\trank\n");
        for d in &self.donors {
            let wer = d.wer.map_or_else(|| "NA".to_string(), |w| w.to_string());
            let werr = d.werr.map_or_else(|| "NA".to_string(), format_werr);
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", d.donor, d.score, wer, werr, d.rank);
        }
        match self.pearson_r {
            Some(r) => {
                let _ = writeln!(out, "# pearson_r\t{r:.4}");
            }
            None => out.push_str("# pearson_r\tNA\n"),
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Reads either a JSON object mapping donor to score, or an array of
/// entries with `donor`, `score` (or `value`) and optional `wer`.
pub fn read_donor_entries(path: &Path) -> Result<Vec<DonorEntry>> {
    let text = io::read_to_string(path)?;
    parse_donor_entries(&text)
}

pub(crate) fn parse_donor_entries(text: &str) -> Result<Vec<DonorEntry>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value {
        serde_json::Value::Object(map) => map
            .into_iter()
            .map(|(donor, v)| {
                let score = v
                    .as_f64()
                    .ok_or_else(|| AtdsError::InvalidArgument(format!("score for {donor} is not a number")))?;
                Ok(DonorEntry::new(donor, score, None))
            })
            .collect(),
        v @ serde_json::Value::Array(_) => Ok(serde_json::from_value(v)?),
        _ => Err(AtdsError::InvalidArgument("expected a JSON object or array of donor entries".into())),
    }
}
