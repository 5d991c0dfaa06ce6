use std::path::PathBuf;

use atds_core::analysis::{DonorReport, RankedDonor};
use atds_core::corpus::{self, CorpusManifest, EmbeddingMatrix, DEFAULT_FRAME_RATE_HZ};
use atds_core::quantizer::{self, Codebook, FrameSlice, KMeansParams};
use atds_core::similarity::{self, TokenDistribution};
use atds_core::tokenizer::{self, CharString, SubwordOptions, SubwordVocab, DEFAULT_BASE_CODEPOINT};
use pyo3::prelude::*;

use crate::IntoPyResult;

/// `(rank, donor, score, wer, werr)`.
type DonorRow = (usize, String, f64, Option<f64>, Option<f64>);

pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEmbeddingMatrix>()?;
    m.add_class::<PyCorpusManifest>()?;
    m.add_class::<PyCodebook>()?;
    m.add_class::<PySubwordVocab>()?;
    m.add_class::<PyTokenDistribution>()?;
    m.add_class::<PyDonorReport>()?;
    Ok(())
}

pub(crate) fn flatten(rows: &[Vec<f32>]) -> PyResult<(Vec<f32>, usize)> {
    let dim = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != dim) {
        return Err(pyo3::exceptions::PyValueError::new_err("rows have different lengths"));
    }
    Ok((rows.concat(), dim))
}

/// Frames of one utterance, row-major.
#[pyclass(name = "EmbeddingMatrix", module = "atds", frozen)]
pub struct PyEmbeddingMatrix {
    pub(crate) inner: EmbeddingMatrix,
}

#[pymethods]
impl PyEmbeddingMatrix {
    #[new]
    #[pyo3(signature = (rows, frame_rate_hz = DEFAULT_FRAME_RATE_HZ))]
    fn new(rows: Vec<Vec<f32>>, frame_rate_hz: f32) -> PyResult<Self> {
        Ok(Self { inner: EmbeddingMatrix::from_rows(&rows, frame_rate_hz).py()? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: corpus::read_embeddings(&path).py()? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        corpus::write_embeddings(&self.inner, &path).py()
    }

    #[getter]
    fn frames(&self) -> usize {
        self.inner.frames()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn frame_rate_hz(&self) -> f32 {
        self.inner.frame_rate_hz()
    }

    #[getter]
    fn duration_s(&self) -> f64 {
        self.inner.duration_s()
    }

    fn rows(&self) -> Vec<Vec<f32>> {
        self.inner.rows().map(<[f32]>::to_vec).collect()
    }

    fn __repr__(&self) -> String {
        format!("EmbeddingMatrix(frames={}, dim={})", self.inner.frames(), self.inner.dim())
    }
}

/// Utterance list of one corpus: `(utt_id, path, duration_s, language)` records.
#[pyclass(name = "CorpusManifest", module = "atds", frozen)]
pub struct PyCorpusManifest {
    inner: CorpusManifest,
}

#[pymethods]
impl PyCorpusManifest {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: corpus::load_manifest(&path).py()? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        corpus::write_manifest(&self.inner, &path).py()
    }

    /// Seeded random subset covering at least `hours` of audio.
    fn sample(&self, hours: f64, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: corpus::sample_subset(&self.inner, hours, seed).py()? })
    }

    #[getter]
    fn records(&self) -> Vec<(String, String, f64, String)> {
        self.inner
            .records()
            .iter()
            .map(|r| (r.utt_id.clone(), r.path.clone(), r.duration_s, r.language.clone()))
            .collect()
    }

    #[getter]
    fn total_duration_s(&self) -> f64 {
        self.inner.total_duration_s()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// k-means centroids.
#[pyclass(name = "Codebook", module = "atds", frozen)]
pub struct PyCodebook {
    pub(crate) inner: Codebook,
}

#[pymethods]
impl PyCodebook {
    /// Fit on in-memory frames given as a list of rows.
    #[staticmethod]
    #[pyo3(signature = (frames, k, seed = 0, max_iters = 100, rel_tol = 1e-6))]
    fn train(
        py: Python<'_>,
        frames: Vec<Vec<f32>>,
        k: usize,
        seed: u64,
        max_iters: usize,
        rel_tol: f64,
    ) -> PyResult<Self> {
        let (data, dim) = flatten(&frames)?;
        let params = KMeansParams { k, seed, max_iters, rel_tol };
        let inner = py.detach(|| quantizer::train_codebook_from(&FrameSlice::new(&data, dim)?, &params)).py()?.codebook;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: quantizer::read_codebook(&path).py()? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        quantizer::write_codebook(&self.inner, &path).py()
    }

    /// Nearest-centroid index of every row.
    fn assign(&self, py: Python<'_>, frames: Vec<Vec<f32>>) -> PyResult<Vec<u32>> {
        let (data, _) = flatten(&frames)?;
        py.detach(|| self.inner.assign_rows(&data)).py()
    }

    fn centroids(&self) -> Vec<Vec<f32>> {
        (0..self.inner.k()).map(|j| self.inner.centroid(j).to_vec()).collect()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    #[getter]
    fn inertia(&self) -> f64 {
        self.inner.inertia()
    }

    fn __repr__(&self) -> String {
        format!("Codebook(k={}, dim={}, inertia={})", self.inner.k(), self.inner.dim(), self.inner.inertia())
    }
}

/// Byte-pair subword model over cluster characters.
#[pyclass(name = "SubwordVocab", module = "atds", frozen)]
pub struct PySubwordVocab {
    pub(crate) inner: SubwordVocab,
}

#[pymethods]
impl PySubwordVocab {
    #[staticmethod]
    #[pyo3(signature = (strings, vocab_size, k, base_codepoint = DEFAULT_BASE_CODEPOINT, min_frequency = 2))]
    fn train(
        py: Python<'_>,
        strings: Vec<String>,
        vocab_size: usize,
        k: usize,
        base_codepoint: u32,
        min_frequency: u64,
    ) -> PyResult<Self> {
        let corpus: Vec<CharString> =
            strings.iter().enumerate().map(|(i, s)| CharString::new(format!("s{i}"), s)).collect();
        let opts = SubwordOptions { vocab_size, k, base_codepoint, min_frequency };
        Ok(Self { inner: py.detach(|| tokenizer::train_subword_with(&corpus, &opts)).py()? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: SubwordVocab::from_json(text).py()? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: tokenizer::read_vocab(&path).py()? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        tokenizer::write_vocab(&self.inner, &path).py()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn encode(&self, text: &str) -> Vec<u32> {
        self.inner.encode(&CharString::new("", text)).ids
    }

    fn decode(&self, ids: Vec<u32>) -> String {
        self.inner.decode(&ids)
    }

    fn token(&self, id: u32) -> Option<String> {
        self.inner.token(id).map(str::to_string)
    }

    #[getter]
    fn merges(&self) -> Vec<(String, String)> {
        self.inner.merges().to_vec()
    }

    #[getter]
    fn tokens(&self) -> Vec<String> {
        self.inner.tokens().to_vec()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn base_codepoint(&self) -> u32 {
        self.inner.base_codepoint()
    }

    #[getter]
    fn fingerprint(&self) -> u64 {
        self.inner.fingerprint()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Token counts of one language under one vocabulary.
#[pyclass(name = "TokenDistribution", module = "atds", frozen)]
pub struct PyTokenDistribution {
    pub(crate) inner: TokenDistribution,
}

#[pymethods]
impl PyTokenDistribution {
    #[staticmethod]
    fn from_counts(language: String, vocab_fingerprint: u64, counts: Vec<u64>) -> PyResult<Self> {
        Ok(Self { inner: TokenDistribution::from_counts(language, vocab_fingerprint, counts).py()? })
    }

    /// Count every id of every encoded sequence.
    #[staticmethod]
    fn from_sequences(sequences: Vec<Vec<u32>>, vocab: &PySubwordVocab, language: &str) -> PyResult<Self> {
        let seqs: Vec<tokenizer::TokenSequence> = sequences
            .into_iter()
            .enumerate()
            .map(|(i, ids)| tokenizer::TokenSequence { utt_id: format!("s{i}"), ids })
            .collect();
        Ok(Self { inner: similarity::token_distribution(&seqs, &vocab.inner, language).py()? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: similarity::read_distribution(&path).py()? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        similarity::write_distribution(&self.inner, &path).py()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn relative_frequencies(&self) -> Vec<f64> {
        self.inner.relative_frequencies()
    }

    #[getter]
    fn language(&self) -> String {
        self.inner.language.clone()
    }

    #[getter]
    fn vocab_fingerprint(&self) -> u64 {
        self.inner.vocab_fingerprint
    }

    #[getter]
    fn counts(&self) -> Vec<u64> {
        self.inner.counts.clone()
    }

    #[getter]
    fn total(&self) -> u64 {
        self.inner.total
    }
}

/// Donors ordered by score.
#[pyclass(name = "DonorReport", module = "atds", frozen)]
pub struct PyDonorReport {
    pub(crate) inner: DonorReport,
}

#[pymethods]
impl PyDonorReport {
    /// `(rank, donor, score, wer, werr)` tuples, best first.
    #[getter]
    fn donors(&self) -> Vec<DonorRow> {
        self.inner
            .donors
            .iter()
            .map(|RankedDonor { rank, donor, score, wer, werr }| (*rank, donor.clone(), *score, *wer, *werr))
            .collect()
    }

    #[getter]
    fn pearson_r(&self) -> Option<f64> {
        self.inner.pearson_r
    }

    fn to_tsv(&self) -> String {
        self.inner.to_tsv()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().py()
    }
}
