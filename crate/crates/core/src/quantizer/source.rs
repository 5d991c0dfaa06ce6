use std::fs::File;
use std::io::{Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use crate::corpus::{read_embeddings, CorpusManifest};
use crate::error::{AtdsError, Result};

/// Sequential access to a large frame collection without requiring it to be
/// resident in memory.
pub trait FrameSource: Sync {
    fn dim(&self) -> usize;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Visit every frame in order as row-major blocks. `start` is the global
    /// index of the block's first row.
    fn for_each_block(&self, f: &mut dyn FnMut(usize, &[f32]) -> Result<()>) -> Result<()>;

    fn row(&self, index: usize) -> Result<Vec<f32>>;
}

/// Borrowed in-memory frames.
#[derive(Debug, Clone, Copy)]
pub struct FrameSlice<'a> {
    data: &'a [f32],
    dim: usize,
}

impl<'a> FrameSlice<'a> {
    pub fn new(data: &'a [f32], dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(AtdsError::InvalidArgument("frame dimension must be >= 1".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(AtdsError::LengthMismatch(data.len(), data.len() / dim * dim));
        }
        Ok(Self { data, dim })
    }

    pub fn data(&self) -> &'a [f32] {
        self.data
    }
}

impl FrameSource for FrameSlice<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    fn for_each_block(&self, f: &mut dyn FnMut(usize, &[f32]) -> Result<()>) -> Result<()> {
        const BLOCK_ROWS: usize = 1 << 16;
        for (b, block) in self.data.chunks(BLOCK_ROWS * self.dim).enumerate() {
            f(b * BLOCK_ROWS, block)?;
        }
        Ok(())
    }

    fn row(&self, index: usize) -> Result<Vec<f32>> {
        Ok(self.data[index * self.dim..(index + 1) * self.dim].to_vec())
    }
}

/// Frames streamed from `.ate` files, one file per block.
#[derive(Debug, Clone)]
pub struct AteFileSource {
    paths: Vec<PathBuf>,
    /// `offsets[i]` is the global index of the first frame of `paths[i]`;
    /// the last entry is the total frame count.
    offsets: Vec<usize>,
    dim: usize,
}

impl AteFileSource {
    /// Open the files, reading only headers. All files must share one dimension.
    pub fn open(paths: Vec<PathBuf>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(paths.len() + 1);
        offsets.push(0);
        let mut dim = None;
        for p in &paths {
            let h = crate::corpus::embedding_header(p)?;
            match dim {
                None => dim = Some(h.dim as usize),
                Some(d) if d != h.dim as usize => {
                    return Err(AtdsError::DimensionMismatch { expected: d, actual: h.dim as usize })
                }
                _ => {}
            }
            offsets.push(offsets.last().unwrap() + h.frames as usize);
        }
        let dim = dim.ok_or(AtdsError::EmptyInput("no embedding files"))?;
        Ok(Self { paths, offsets, dim })
    }

    /// Every record of `manifest`, with paths relative to `base_dir`.
    pub fn from_manifest(manifest: &CorpusManifest, base_dir: &Path) -> Result<Self> {
        Self::open(manifest.records().iter().map(|r| base_dir.join(&r.path)).collect())
    }
}

impl FrameSource for AteFileSource {
    fn dim(&self) -> usize {
        self.dim
    }

    fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn for_each_block(&self, f: &mut dyn FnMut(usize, &[f32]) -> Result<()>) -> Result<()> {
        for (p, &start) in self.paths.iter().zip(&self.offsets) {
            let m = read_embeddings(p)?;
            if m.dim() != self.dim {
                return Err(AtdsError::DimensionMismatch { expected: self.dim, actual: m.dim() });
            }
            f(start, m.data())?;
        }
        Ok(())
    }

    fn row(&self, index: usize) -> Result<Vec<f32>> {
        if index >= self.len() {
            return Err(AtdsError::InvalidArgument(format!("frame {index} out of range")));
        }
        let file = self.offsets.partition_point(|&o| o <= index) - 1;
        let local = index - self.offsets[file];
        let path = &self.paths[file];
        let io_err = |e| AtdsError::io(path, e);
        let mut fh = File::open(path).map_err(io_err)?;
        let offset = crate::corpus::EMBEDDING_HEADER_LEN as u64 + (local * self.dim * 4) as u64;
        fh.seek(SeekFrom::Start(offset)).map_err(io_err)?;
        let mut buf = vec![0u8; self.dim * 4];
        fh.read_exact(&mut buf).map_err(io_err)?;
        let row: Vec<f32> = buf.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        if let Some(i) = row.iter().position(|x| !x.is_finite()) {
            return Err(AtdsError::NonFinite(index * self.dim + i));
        }
        Ok(row)
    }
}
