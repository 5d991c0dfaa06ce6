use std::path::Path;

use crate::error::{AtdsError, Result};
use crate::io;

/// Frame rate of wav2vec 2.0-family encoders on 16 kHz audio.
pub const DEFAULT_FRAME_RATE_HZ: f32 = 49.0;

const MAGIC: [u8; 4] = *b"ATDS";
const VERSION: u32 = 1;
pub(crate) const HEADER_LEN: usize = 4 + 4 + 4 + 8 + 4;

/// Row-major `frames x dim` matrix of encoder features for one utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    data: Vec<f32>,
    frames: usize,
    dim: usize,
    frame_rate_hz: f32,
}

impl EmbeddingMatrix {
    pub fn new(data: Vec<f32>, frames: usize, dim: usize, frame_rate_hz: f32) -> Result<Self> {
        let expected =
            frames.checked_mul(dim).ok_or_else(|| AtdsError::InvalidArgument(format!("{frames} x {dim} overflows")))?;
        if data.len() != expected {
            return Err(AtdsError::LengthMismatch(data.len(), expected));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(AtdsError::NonFinite(i));
        }
        if !(frame_rate_hz.is_finite() && frame_rate_hz > 0.0) {
            return Err(AtdsError::InvalidArgument(format!("frame rate must be > 0, got {frame_rate_hz}")));
        }
        Ok(Self { data, frames, dim, frame_rate_hz })
    }

    /// Build from row vectors; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f32>], frame_rate_hz: f32) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(AtdsError::DimensionMismatch { expected: dim, actual: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(data, rows.len(), dim, frame_rate_hz)
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frame_rate_hz(&self) -> f32 {
        self.frame_rate_hz
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        // chunks_exact(0) panics; a zero-dim matrix has no meaningful rows.
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn duration_s(&self) -> f64 {
        self.frames as f64 / self.frame_rate_hz as f64
    }

    /// Arithmetic mean over frames, in double precision.
    pub fn mean_row(&self) -> Option<Vec<f64>> {
        if self.frames == 0 {
            return None;
        }
        let mut acc = vec![0.0f64; self.dim];
        for row in self.rows() {
            for (a, &x) in acc.iter_mut().zip(row) {
                *a += x as f64;
            }
        }
        let n = self.frames as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Some(acc)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len() * 4);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.frames as u64).to_le_bytes());
        out.extend_from_slice(&self.frame_rate_hz.to_le_bytes());
        for x in &self.data {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = read_header(bytes)?;
        let payload = &bytes[HEADER_LEN..];
        let expected =
            header.payload_len().ok_or(AtdsError::Truncated { expected: u64::MAX, actual: payload.len() as u64 })?;
        if payload.len() as u64 != expected {
            return Err(AtdsError::Truncated { expected, actual: payload.len() as u64 });
        }
        let data = payload.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        Self::new(data, header.frames as usize, header.dim as usize, header.frame_rate_hz)
    }
}

/// Parsed `.ate` header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct AteHeader {
    pub dim: u32,
    pub frames: u64,
    pub frame_rate_hz: f32,
}

impl AteHeader {
    fn payload_len(&self) -> Option<u64> {
        self.frames.checked_mul(self.dim as u64)?.checked_mul(4)
    }
}

pub(crate) fn read_header(bytes: &[u8]) -> Result<AteHeader> {
    if bytes.len() >= 4 && bytes[..4] != MAGIC {
        return Err(AtdsError::BadMagic { expected: MAGIC, found: [bytes[0], bytes[1], bytes[2], bytes[3]] });
    }
    if bytes.len() < HEADER_LEN {
        return Err(AtdsError::Truncated { expected: HEADER_LEN as u64, actual: bytes.len() as u64 });
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(AtdsError::UnsupportedVersion(version));
    }
    Ok(AteHeader {
        dim: u32_at(8),
        frames: u64::from_le_bytes(bytes[12..20].try_into().unwrap()),
        frame_rate_hz: f32::from_le_bytes(bytes[20..24].try_into().unwrap()),
    })
}

/// Read only the header of an `.ate` file.
pub(crate) fn read_header_from(path: &Path) -> Result<AteHeader> {
    use std::io::Read;
    let mut buf = [0u8; HEADER_LEN];
    let mut f = std::fs::File::open(path).map_err(|e| AtdsError::io(path, e))?;
    let mut n = 0;
    while n < HEADER_LEN {
        match f.read(&mut buf[n..]).map_err(|e| AtdsError::io(path, e))? {
            0 => break,
            m => n += m,
        }
    }
    read_header(&buf[..n])
}

pub fn read_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    EmbeddingMatrix::from_bytes(&io::read_bytes(path)?)
}

pub fn write_embeddings(matrix: &EmbeddingMatrix, path: &Path) -> Result<()> {
    io::write_atomic(path, &matrix.to_bytes())
}
