use std::collections::BTreeMap;
use std::path::PathBuf;

use atds_core::analysis::{self, DonorEntry, WerOptions};
use atds_core::config::PipelineConfig;
use atds_core::pipeline;
use atds_core::quantizer::ClusterSequence;
use atds_core::similarity;
use atds_core::tokenizer::{self, DEFAULT_BASE_CODEPOINT};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use crate::classes::{PyDonorReport, PyTokenDistribution};
use crate::IntoPyResult;

pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(clusters_to_chars, m)?)?;
    m.add_function(wrap_pyfunction!(dedup, m)?)?;
    m.add_function(wrap_pyfunction!(cosine, m)?)?;
    m.add_function(wrap_pyfunction!(atds_score, m)?)?;
    m.add_function(wrap_pyfunction!(wer, m)?)?;
    m.add_function(wrap_pyfunction!(werr, m)?)?;
    m.add_function(wrap_pyfunction!(format_werr, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(rank_donors, m)?)?;
    m.add_function(wrap_pyfunction!(phone_map, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    Ok(())
}

/// One character per cluster index, starting at `base_codepoint`.
#[pyfunction]
#[pyo3(signature = (indices, k, base_codepoint = DEFAULT_BASE_CODEPOINT))]
fn clusters_to_chars(indices: Vec<u32>, k: usize, base_codepoint: u32) -> PyResult<String> {
    let seq = ClusterSequence { utt_id: String::new(), indices };
    Ok(tokenizer::clusters_to_chars(&seq, base_codepoint, k).py()?.as_string())
}

/// Collapse repeated characters; returns the string and the run lengths.
#[pyfunction]
fn dedup(text: &str) -> (String, Vec<u32>) {
    let d = tokenizer::dedup(&tokenizer::CharString::new("", text));
    (d.string.as_string(), d.run_lengths)
}

#[pyfunction]
fn cosine(u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    similarity::cosine(&u, &v).py()
}

#[pyfunction]
#[pyo3(name = "atds")]
fn atds_score(target: &PyTokenDistribution, donor: &PyTokenDistribution) -> PyResult<f64> {
    Ok(similarity::atds(&target.inner, &donor.inner).py()?.value)
}

/// Word error rate of one hypothesis; returns a dict of counts and the rate.
#[pyfunction]
#[pyo3(signature = (reference, hypothesis, lowercase = false, strip_punctuation = false))]
fn wer<'py>(
    py: Python<'py>,
    reference: &str,
    hypothesis: &str,
    lowercase: bool,
    strip_punctuation: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = WerOptions { lowercase, strip_punctuation };
    let r =
        analysis::wer(&analysis::tokenize_words(reference, opts), &analysis::tokenize_words(hypothesis, opts)).py()?;
    let d = PyDict::new(py);
    d.set_item("wer", r.wer)?;
    d.set_item("substitutions", r.substitutions)?;
    d.set_item("insertions", r.insertions)?;
    d.set_item("deletions", r.deletions)?;
    d.set_item("ref_words", r.ref_words)?;
    Ok(d)
}

#[pyfunction]
fn werr(baseline_wer: f64, wer: f64) -> PyResult<f64> {
    analysis::werr(baseline_wer, wer).py()
}

#[pyfunction]
fn format_werr(werr_pct: f64) -> String {
    analysis::format_werr(werr_pct)
}

#[pyfunction]
fn pearson(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    analysis::pearson(&xs, &ys).py()
}

/// Rank donors given a mapping of donor to score, and optionally donor to WER.
#[pyfunction]
#[pyo3(signature = (scores, wers = None, baseline_wer = None))]
fn rank_donors(
    scores: BTreeMap<String, f64>,
    wers: Option<BTreeMap<String, f64>>,
    baseline_wer: Option<f64>,
) -> PyResult<PyDonorReport> {
    let wers = wers.unwrap_or_default();
    let entries: Vec<DonorEntry> = scores
        .into_iter()
        .map(|(d, s)| {
            let w = wers.get(&d).copied();
            DonorEntry::new(d, s, w)
        })
        .collect();
    Ok(PyDonorReport { inner: analysis::rank_donors(&entries, baseline_wer).py()? })
}

/// Summary lines of P(phone | token) from a spans file and a phone alignment file.
#[pyfunction]
#[pyo3(signature = (spans_path, phones_path, frame_rate_hz = 49.0, top_tokens = 10, top_phones = 3))]
fn phone_map(
    spans_path: PathBuf,
    phones_path: PathBuf,
    frame_rate_hz: f64,
    top_tokens: usize,
    top_phones: usize,
) -> PyResult<String> {
    let spans = tokenizer::read_spans(&spans_path).py()?;
    let phones = analysis::read_phone_intervals(&phones_path).py()?;
    let table = analysis::phone_token_correspondence(&spans, &phones, frame_rate_hz).py()?;
    Ok(table.render(top_tokens, top_phones))
}

/// Full target-versus-donors run. Returns `{donor: ATDS}` and writes all
/// artifacts to `out_dir`.
#[pyfunction]
#[pyo3(signature = (target_manifest, donor_manifests, out_dir, hours = 5.0, k = 500, vocab_size = 10_000, seed = 0, standardize = false))]
#[allow(clippy::too_many_arguments)]
fn run_pipeline(
    py: Python<'_>,
    target_manifest: PathBuf,
    donor_manifests: Vec<PathBuf>,
    out_dir: PathBuf,
    hours: f64,
    k: usize,
    vocab_size: usize,
    seed: u64,
    standardize: bool,
) -> PyResult<BTreeMap<String, f64>> {
    let cfg = PipelineConfig {
        target_manifest,
        donor_manifests,
        hours,
        k,
        vocab_size,
        seed,
        standardize,
        ..PipelineConfig::default()
    };
    let out = py.detach(|| pipeline::run_pipeline(&cfg, &out_dir)).py()?;
    Ok(out.scores.into_iter().map(|s| (s.donor, s.value)).collect())
}
