use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FrameSource;
use crate::error::{AtdsError, Result};
use crate::io;

/// Per-dimension z-scoring fitted on training frames. Dimensions with zero
/// variance keep unit scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(source: &dyn FrameSource) -> Result<Self> {
        let dim = source.dim();
        let n = source.len();
        if n == 0 {
            return Err(AtdsError::EmptyInput("no frames to standardize"));
        }
        let mut mean = vec![0.0f64; dim];
        source.for_each_block(&mut |_, block| {
            for row in block.chunks_exact(dim) {
                for (m, &x) in mean.iter_mut().zip(row) {
                    *m += x as f64;
                }
            }
            Ok(())
        })?;
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut var = vec![0.0f64; dim];
        source.for_each_block(&mut |_, block| {
            for row in block.chunks_exact(dim) {
                for ((v, &x), m) in var.iter_mut().zip(row).zip(&mean) {
                    let d = x as f64 - m;
                    *v += d * d;
                }
            }
            Ok(())
        })?;
        let scale = var
            .into_iter()
            .map(|v| {
                let sd = (v / n as f64).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { mean, scale })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply_into(&self, block: &[f32], out: &mut Vec<f32>) {
        out.clear();
        out.extend(block.chunks_exact(self.dim()).flat_map(|row| {
            row.iter().zip(&self.mean).zip(&self.scale).map(|((&x, m), s)| ((x as f64 - m) / s) as f32)
        }));
    }

    pub fn apply(&self, block: &[f32]) -> Vec<f32> {
        let mut out = Vec::with_capacity(block.len());
        self.apply_into(block, &mut out);
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_atomic(path, serde_json::to_string(self)?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&io::read_to_string(path)?)?)
    }
}

/// A frame source viewed through a [`Standardizer`].
pub struct StandardizedSource<'a, S: FrameSource + ?Sized> {
    inner: &'a S,
    standardizer: &'a Standardizer,
}

impl<'a, S: FrameSource + ?Sized> StandardizedSource<'a, S> {
    pub fn new(inner: &'a S, standardizer: &'a Standardizer) -> Result<Self> {
        if inner.dim() != standardizer.dim() {
            return Err(AtdsError::DimensionMismatch { expected: standardizer.dim(), actual: inner.dim() });
        }
        Ok(Self { inner, standardizer })
    }
}

impl<S: FrameSource + ?Sized> FrameSource for StandardizedSource<'_, S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn len(&self) -> usize {
        self.inner.len()
    }

    fn for_each_block(&self, f: &mut dyn FnMut(usize, &[f32]) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        self.inner.for_each_block(&mut |start, block| {
            self.standardizer.apply_into(block, &mut buf);
            f(start, &buf)
        })
    }

    fn row(&self, index: usize) -> Result<Vec<f32>> {
        Ok(self.standardizer.apply(&self.inner.row(index)?))
    }
}
