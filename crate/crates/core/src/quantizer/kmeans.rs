//! Lloyd's k-means with k-means++ seeding.
//!
//! Every reduction (sums, counts, inertia) runs sequentially in frame order
//! over per-frame results computed in parallel, so a run is bit-reproducible
//! regardless of the thread count.

use log::{debug, info};

use super::{nearest_block, sq_dist, Codebook, FrameSlice, FrameSource};
use crate::error::{AtdsError, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansParams {
    pub k: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stop once `(prev - cur) / prev` falls below this.
    pub rel_tol: f64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        Self { k: 500, seed: 0, max_iters: 100, rel_tol: 1e-6 }
    }
}

impl KMeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(AtdsError::InvalidArgument("k must be >= 1".into()));
        }
        if self.max_iters == 0 {
            return Err(AtdsError::InvalidArgument("max_iters must be >= 1".into()));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(AtdsError::InvalidArgument(format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        Ok(())
    }
}

/// A trained codebook together with its optimization history.
#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub codebook: Codebook,
    /// Inertia of the k-means++ seeds.
    pub init_inertia: f64,
    /// Inertia of each Lloyd assignment step; `trace[0] == init_inertia`.
    pub trace: Vec<f64>,
    pub converged: bool,
    /// Labels from the last assignment step; the final centroids are the
    /// means of these clusters (repaired empty clusters excepted).
    pub labels: Vec<u32>,
}

/// Train on in-memory row-major frames.
pub fn train_codebook(frames: &[f32], dim: usize, params: &KMeansParams) -> Result<Codebook> {
    Ok(train_codebook_from(&FrameSlice::new(frames, dim)?, params)?.codebook)
}

pub fn train_codebook_from(source: &dyn FrameSource, params: &KMeansParams) -> Result<TrainingRun> {
    params.validate()?;
    let dim = source.dim();
    let m = source.len();
    if dim == 0 {
        return Err(AtdsError::InvalidArgument("frame dimension must be >= 1".into()));
    }
    if m < params.k {
        return Err(AtdsError::InvalidArgument(format!("need at least k = {} frames, got {m}", params.k)));
    }
    source.for_each_block(&mut |start, block| match block.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(AtdsError::NonFinite(start * dim + i)),
        None => Ok(()),
    })?;

    let mut rng = SplitMix64::new(params.seed);
    let (mut centroids, init_inertia) = kmeans_pp(source, params.k, &mut rng)?;
    info!("k-means++ seeded {} centroids, inertia {init_inertia:.6e}", params.k);

    let k = params.k;
    let mut labels = vec![0u32; m];
    let mut dists = vec![0.0f64; m];
    let mut trace = Vec::new();
    let mut converged = false;

    for iter in 0..params.max_iters {
        let mut sums = vec![0.0f64; k * dim];
        let mut counts = vec![0usize; k];
        let mut inertia = 0.0f64;
        source.for_each_block(&mut |start, block| {
            for (i, (row, (j, d))) in block.chunks_exact(dim).zip(nearest_block(block, &centroids, dim)).enumerate() {
                let j = j as usize;
                labels[start + i] = j as u32;
                dists[start + i] = d;
                inertia += d;
                counts[j] += 1;
                for (s, &x) in sums[j * dim..(j + 1) * dim].iter_mut().zip(row) {
                    *s += x as f64;
                }
            }
            Ok(())
        })?;
        debug!("lloyd iteration {iter}: inertia {inertia:.9e}");

        let improvement = trace.last().map(|&prev: &f64| if prev > 0.0 { (prev - inertia) / prev } else { 0.0 });
        trace.push(inertia);

        for j in 0..k {
            if counts[j] > 0 {
                let n = counts[j] as f64;
                for (c, s) in centroids[j * dim..(j + 1) * dim].iter_mut().zip(&sums[j * dim..]) {
                    *c = s / n;
                }
            }
        }
        repair_empty(source, &counts, &mut dists, &mut centroids)?;

        if inertia == 0.0 || improvement.is_some_and(|r| r < params.rel_tol) {
            converged = true;
            break;
        }
    }

    let rounded: Vec<f32> = centroids.iter().map(|&c| c as f32).collect();
    let mut codebook = Codebook::new(rounded, k, dim, params.seed, 0.0)?;
    let final_inertia = super::codebook::inertia_from(&codebook, source)?;
    codebook.set_inertia(final_inertia);
    info!("k-means finished after {} iterations (converged: {converged}), inertia {final_inertia:.6e}", trace.len());
    Ok(TrainingRun { codebook, init_inertia, trace, converged, labels })
}

/// D^2-weighted seeding. Returns the seeds and their inertia.
fn kmeans_pp(source: &dyn FrameSource, k: usize, rng: &mut SplitMix64) -> Result<(Vec<f64>, f64)> {
    let dim = source.dim();
    let m = source.len();
    let mut centroids: Vec<f64> = Vec::with_capacity(k * dim);
    let mut min_d2 = vec![f64::INFINITY; m];

    let first = rng.below(m as u64) as usize;
    centroids.extend(source.row(first)?.iter().map(|&x| x as f64));
    update_min_dist(source, &centroids[..dim], &mut min_d2)?;

    for _ in 1..k {
        let total: f64 = min_d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.next_f64() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &d) in min_d2.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    chosen = Some(i);
                    break;
                }
            }
            // Rounding can leave `acc` a hair under `target`; fall back to
            // the last frame with positive weight.
            chosen.unwrap_or_else(|| min_d2.iter().rposition(|&d| d > 0.0).unwrap())
        } else {
            rng.below(m as u64) as usize
        };
        let start = centroids.len();
        centroids.extend(source.row(pick)?.iter().map(|&x| x as f64));
        update_min_dist(source, &centroids[start..], &mut min_d2)?;
    }
    let inertia = min_d2.iter().sum();
    Ok((centroids, inertia))
}

fn update_min_dist(source: &dyn FrameSource, centroid: &[f64], min_d2: &mut [f64]) -> Result<()> {
    use rayon::prelude::*;
    let dim = source.dim();
    source.for_each_block(&mut |start, block| {
        let rows = block.len() / dim;
        min_d2[start..start + rows]
            .par_iter_mut()
            .zip(block.par_chunks_exact(dim))
            .for_each(|(d, row)| *d = d.min(sq_dist(row, centroid)));
        Ok(())
    })
}

/// Move each empty centroid onto the frame farthest from its current
/// centroid. Frames are claimed at most once; ties go to the lowest index.
fn repair_empty(source: &dyn FrameSource, counts: &[usize], dists: &mut [f64], centroids: &mut [f64]) -> Result<()> {
    let dim = source.dim();
    for (j, _) in counts.iter().enumerate().filter(|(_, &c)| c == 0) {
        let mut far = 0;
        for (i, &d) in dists.iter().enumerate() {
            if d > dists[far] {
                far = i;
            }
        }
        debug!("centroid {j} is empty; moving it to frame {far}");
        dists[far] = -1.0;
        for (c, x) in centroids[j * dim..(j + 1) * dim].iter_mut().zip(source.row(far)?) {
            *c = x as f64;
        }
    }
    Ok(())
}
