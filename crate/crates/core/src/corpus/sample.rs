use super::manifest::CorpusManifest;
use crate::error::{AtdsError, Result};
use crate::rng::SplitMix64;

/// Relative slack when comparing the requested duration with the corpus total,
/// so that asking for exactly the whole corpus succeeds despite summation order.
const TOTAL_SLACK: f64 = 1e-9;

/// Draw a random subset of at least `target_hours` of audio.
///
/// Records are shuffled with [`SplitMix64`] seeded by `seed` (Fisher-Yates),
/// then taken in shuffled order until the cumulative duration reaches the
/// target. The utterance that crosses the boundary is included.
pub fn sample_subset(manifest: &CorpusManifest, target_hours: f64, seed: u64) -> Result<CorpusManifest> {
    if !(target_hours.is_finite() && target_hours >= 0.0) {
        return Err(AtdsError::InvalidArgument(format!("target hours must be >= 0, got {target_hours}")));
    }
    if target_hours == 0.0 {
        return Ok(CorpusManifest::default());
    }
    if manifest.is_empty() {
        return Err(AtdsError::EmptyManifest);
    }
    let target_s = target_hours * 3600.0;
    let available = manifest.total_duration_s();
    if target_s > available * (1.0 + TOTAL_SLACK) {
        return Err(AtdsError::InsufficientData { requested_s: target_s, available_s: available });
    }

    let mut order: Vec<usize> = (0..manifest.len()).collect();
    SplitMix64::new(seed).shuffle(&mut order);

    let records = manifest.records();
    let mut picked = Vec::new();
    let mut total = 0.0;
    for i in order {
        if total >= target_s {
            break;
        }
        total += records[i].duration_s;
        picked.push(records[i].clone());
    }
    CorpusManifest::new(picked)
}
