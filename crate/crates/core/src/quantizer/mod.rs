//! k-means codebook training and nearest-centroid quantization.

mod codebook;
mod kmeans;
mod sequence;
mod source;
mod standardize;

pub use codebook::{inertia, read_codebook, write_codebook, Codebook};
pub use kmeans::{train_codebook, train_codebook_from, KMeansParams, TrainingRun};
pub use sequence::{read_cluster_sequences, write_cluster_sequences, ClusterSequence};
pub use source::{AteFileSource, FrameSlice, FrameSource};
pub use standardize::{StandardizedSource, Standardizer};

/// Rows per parallel work unit. Results are gathered in chunk order, so the
/// output does not depend on the number of worker threads.
pub(crate) const CHUNK_ROWS: usize = 1024;

/// Squared Euclidean distance from an `f32` frame to an `f64` centroid,
/// accumulated in double precision.
#[inline]
pub(crate) fn sq_dist(frame: &[f32], centroid: &[f64]) -> f64 {
    frame
        .iter()
        .zip(centroid)
        .map(|(&x, &c)| {
            let d = x as f64 - c;
            d * d
        })
        .sum()
}

/// Index and squared distance of the closest centroid; ties go to the lowest index.
#[inline]
pub(crate) fn nearest(frame: &[f32], centroids: &[f64], dim: usize) -> (u32, f64) {
    let mut best = (0u32, f64::INFINITY);
    for (j, c) in centroids.chunks_exact(dim).enumerate() {
        let d = sq_dist(frame, c);
        if d < best.1 {
            best = (j as u32, d);
        }
    }
    best
}

/// Nearest-centroid labels and distances for a block of rows, computed in
/// parallel over fixed-size chunks.
pub(crate) fn nearest_block(block: &[f32], centroids: &[f64], dim: usize) -> Vec<(u32, f64)> {
    use rayon::prelude::*;
    block
        .par_chunks(CHUNK_ROWS * dim)
        .flat_map_iter(|chunk| chunk.chunks_exact(dim).map(|row| nearest(row, centroids, dim)))
        .collect()
}
