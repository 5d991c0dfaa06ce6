use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = AtdsError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AtdsError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("manifest is empty")]
    EmptyManifest,

    #[error("duplicate utterance id `{0}`")]
    DuplicateUttId(String),

    #[error("bad magic {found:?}, expected {expected:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),

    #[error("payload is {actual} bytes, header declares {expected}")]
    Truncated { expected: u64, actual: u64 },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("requested {requested_s} s of audio but only {available_s} s available")]
    InsufficientData { requested_s: f64, available_s: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("cluster index {index} out of range for k = {k}")]
    IndexOutOfRange { index: u32, k: usize },

    #[error("codepoint range [{base:#x}, {base:#x} + {k}) is not valid scalar values")]
    InvalidCodepointRange { base: u32, k: usize },

    #[error("vocab fingerprint mismatch: {0:016x} vs {1:016x}")]
    FingerprintMismatch(u64, u64),

    #[error("zero vector")]
    ZeroVector,

    #[error("zero variance")]
    ZeroVariance,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("malformed interval: {0}")]
    MalformedInterval(String),

    #[error("inconsistent span bookkeeping: {0}")]
    SpanBookkeeping(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl AtdsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AtdsError::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        AtdsError::Parse { path: path.into(), line, message: message.into() }
    }

    /// Errors caused by bad parameters rather than by data or the environment.
    pub fn is_validation(&self) -> bool {
        matches!(self, AtdsError::InvalidArgument(_) | AtdsError::InvalidCodepointRange { .. })
    }
}
