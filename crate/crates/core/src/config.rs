//! Run configuration for the end-to-end pipeline, loadable from a TOML file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::DEFAULT_FRAME_RATE_HZ;
use crate::error::{AtdsError, Result};
use crate::io;
use crate::tokenizer::{validate_codepoint_range, DEFAULT_BASE_CODEPOINT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub target_manifest: PathBuf,
    pub donor_manifests: Vec<PathBuf>,
    /// Size of the random target subset used to fit the quantizer and subword model.
    pub hours: f64,
    pub k: usize,
    pub vocab_size: usize,
    pub seed: u64,
    /// Free-form record of where the embeddings came from (model, layer).
    pub layer_note: String,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub base_codepoint: u32,
    pub min_frequency: u64,
    pub standardize: bool,
    pub frame_rate_hz: f64,
    pub baseline_wer: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            target_manifest: PathBuf::new(),
            donor_manifests: Vec::new(),
            hours: 5.0,
            k: 500,
            vocab_size: 10_000,
            seed: 0,
            layer_note: String::new(),
            max_iters: 100,
            rel_tol: 1e-6,
            base_codepoint: DEFAULT_BASE_CODEPOINT,
            min_frequency: 2,
            standardize: false,
            frame_rate_hz: DEFAULT_FRAME_RATE_HZ as f64,
            baseline_wer: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| AtdsError::InvalidArgument(format!("config: {}", e.message())))
    }

    /// Loads a config file. Relative manifest paths are resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml_str(&io::read_to_string(path)?)?;
        let dir = path.parent().unwrap_or(Path::new(""));
        if !cfg.target_manifest.as_os_str().is_empty() {
            cfg.target_manifest = dir.join(&cfg.target_manifest);
        }
        for d in cfg.donor_manifests.iter_mut() {
            *d = dir.join(&*d);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(AtdsError::InvalidArgument(m));
        if self.target_manifest.as_os_str().is_empty() {
            return bad("target_manifest is required".into());
        }
        if !(self.hours.is_finite() && self.hours > 0.0) {
            return bad(format!("hours must be > 0, got {}", self.hours));
        }
        if self.k == 0 {
            return bad("k must be >= 1".into());
        }
        if self.vocab_size < self.k + 1 {
            return bad(format!("vocab_size must be >= k + 1 = {}, got {}", self.k + 1, self.vocab_size));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be >= 1".into());
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return bad(format!("rel_tol must be > 0, got {}", self.rel_tol));
        }
        if self.min_frequency == 0 {
            return bad("min_frequency must be >= 1".into());
        }
        if !(self.frame_rate_hz.is_finite() && self.frame_rate_hz > 0.0) {
            return bad(format!("frame_rate_hz must be > 0, got {}", self.frame_rate_hz));
        }
        if let Some(b) = self.baseline_wer {
            if !(b.is_finite() && b > 0.0) {
                return bad(format!("baseline_wer must be > 0, got {b}"));
            }
        }
        validate_codepoint_range(self.base_codepoint, self.k)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
