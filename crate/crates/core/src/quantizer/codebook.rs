use std::path::Path;

use super::{nearest, nearest_block, ClusterSequence, FrameSlice, FrameSource};
use crate::corpus::EmbeddingMatrix;
use crate::error::{AtdsError, Result};
use crate::io;

const MAGIC: [u8; 4] = *b"ATCB";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8 + 8;

/// k centroids of dimension `dim`, stored row-major in single precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    k: usize,
    dim: usize,
    centroids: Vec<f32>,
    seed: u64,
    inertia: f64,
    /// `centroids` widened once for distance computations.
    wide: Vec<f64>,
}

impl Codebook {
    pub fn new(centroids: Vec<f32>, k: usize, dim: usize, seed: u64, inertia: f64) -> Result<Self> {
        if k == 0 || dim == 0 {
            return Err(AtdsError::InvalidArgument("codebook needs k >= 1 and dim >= 1".into()));
        }
        if centroids.len() != k * dim {
            return Err(AtdsError::LengthMismatch(centroids.len(), k * dim));
        }
        if let Some(i) = centroids.iter().position(|c| !c.is_finite()) {
            return Err(AtdsError::NonFinite(i));
        }
        if !(inertia.is_finite() && inertia >= 0.0) {
            return Err(AtdsError::InvalidArgument(format!("bad inertia {inertia}")));
        }
        let wide = centroids.iter().map(|&c| c as f64).collect();
        Ok(Self { k, dim, centroids, seed, inertia, wide })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Training objective on the data the codebook was fitted to.
    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    pub(crate) fn set_inertia(&mut self, inertia: f64) {
        self.inertia = inertia;
    }

    pub fn centroids(&self) -> &[f32] {
        &self.centroids
    }

    pub fn centroid(&self, j: usize) -> &[f32] {
        &self.centroids[j * self.dim..(j + 1) * self.dim]
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(AtdsError::DimensionMismatch { expected: self.dim, actual: dim });
        }
        Ok(())
    }

    /// Nearest centroid of a single frame.
    pub fn nearest(&self, frame: &[f32]) -> Result<u32> {
        self.check_dim(frame.len())?;
        Ok(nearest(frame, &self.wide, self.dim).0)
    }

    /// Nearest-centroid index of every row of a row-major block.
    pub fn assign_rows(&self, rows: &[f32]) -> Result<Vec<u32>> {
        if !rows.len().is_multiple_of(self.dim) {
            return Err(AtdsError::DimensionMismatch { expected: self.dim, actual: rows.len() % self.dim });
        }
        Ok(nearest_block(rows, &self.wide, self.dim).into_iter().map(|(j, _)| j).collect())
    }

    pub fn assign(&self, utt_id: impl Into<String>, frames: &EmbeddingMatrix) -> Result<ClusterSequence> {
        if frames.frames() > 0 {
            self.check_dim(frames.dim())?;
        }
        Ok(ClusterSequence { utt_id: utt_id.into(), indices: self.assign_rows(frames.data())? })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.centroids.len() * 4);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.k as u32).to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.inertia.to_le_bytes());
        for c in &self.centroids {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() >= 4 && bytes[..4] != MAGIC {
            return Err(AtdsError::BadMagic { expected: MAGIC, found: bytes[..4].try_into().unwrap() });
        }
        if bytes.len() < HEADER_LEN {
            return Err(AtdsError::Truncated { expected: HEADER_LEN as u64, actual: bytes.len() as u64 });
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let version = u32_at(4);
        if version != VERSION {
            return Err(AtdsError::UnsupportedVersion(version));
        }
        let k = u32_at(8) as usize;
        let dim = u32_at(12) as usize;
        let seed = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
        let inertia = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
        let payload = &bytes[HEADER_LEN..];
        let expected = (k * dim * 4) as u64;
        if payload.len() as u64 != expected {
            return Err(AtdsError::Truncated { expected, actual: payload.len() as u64 });
        }
        let centroids = payload.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        Self::new(centroids, k, dim, seed, inertia)
    }
}

pub fn write_codebook(codebook: &Codebook, path: &Path) -> Result<()> {
    io::write_atomic(path, &codebook.to_bytes())
}

pub fn read_codebook(path: &Path) -> Result<Codebook> {
    Codebook::from_bytes(&io::read_bytes(path)?)
}

/// Sum of squared distances from each frame to its nearest centroid.
pub fn inertia(codebook: &Codebook, frames: &[f32]) -> Result<f64> {
    inertia_from(codebook, &FrameSlice::new(frames, codebook.dim())?)
}

pub(crate) fn inertia_from(codebook: &Codebook, source: &dyn FrameSource) -> Result<f64> {
    codebook.check_dim(source.dim())?;
    let mut total = 0.0f64;
    source.for_each_block(&mut |_, block| {
        total += nearest_block(block, &codebook.wide, codebook.dim).iter().map(|&(_, d)| d).sum::<f64>();
        Ok(())
    })?;
    Ok(total)
}
