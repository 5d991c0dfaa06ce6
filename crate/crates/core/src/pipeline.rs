//! The end-to-end target-versus-donors run, and the per-stage helpers the
//! command-line tools share with it.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;

use crate::analysis::{rank_donors, DonorEntry, DonorReport};
use crate::config::PipelineConfig;
use crate::corpus::{load_manifest, read_embeddings, sample_subset, write_manifest, CorpusManifest};
use crate::error::{AtdsError, Result};
use crate::io;
use crate::quantizer::{
    train_codebook_from, write_codebook, AteFileSource, ClusterSequence, Codebook, KMeansParams, StandardizedSource,
    Standardizer, TrainingRun,
};
use crate::similarity::{
    atds, token_distribution, write_distribution, write_scores, SimilarityScore, TokenDistribution,
};
use crate::tokenizer::{
    clusters_to_chars, dedup, train_subword_with, write_vocab, CharString, Deduped, SubwordOptions, SubwordVocab,
    TokenSequence,
};

/// Directory that relative paths in a manifest are resolved against.
pub fn manifest_base_dir(manifest_path: &Path) -> PathBuf {
    manifest_path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Fit k-means (and optionally a standardizer) on every frame of `manifest`.
pub fn train_quantizer(
    manifest: &CorpusManifest,
    base_dir: &Path,
    params: &KMeansParams,
    standardize: bool,
) -> Result<(TrainingRun, Option<Standardizer>)> {
    let source = AteFileSource::from_manifest(manifest, base_dir)?;
    if standardize {
        let st = Standardizer::fit(&source)?;
        let run = train_codebook_from(&StandardizedSource::new(&source, &st)?, params)?;
        Ok((run, Some(st)))
    } else {
        Ok((train_codebook_from(&source, params)?, None))
    }
}

/// Nearest-centroid sequences for every utterance, in manifest order.
pub fn quantize_manifest(
    manifest: &CorpusManifest,
    base_dir: &Path,
    codebook: &Codebook,
    standardizer: Option<&Standardizer>,
) -> Result<Vec<ClusterSequence>> {
    manifest
        .records()
        .par_iter()
        .map(|rec| {
            let m = read_embeddings(&base_dir.join(&rec.path))?;
            let indices = match standardizer {
                Some(st) => {
                    if st.dim() != m.dim() {
                        return Err(AtdsError::DimensionMismatch { expected: st.dim(), actual: m.dim() });
                    }
                    codebook.assign_rows(&st.apply(m.data()))?
                }
                None => codebook.assign(rec.utt_id.clone(), &m)?.indices,
            };
            Ok(ClusterSequence { utt_id: rec.utt_id.clone(), indices })
        })
        .collect()
}

/// Map cluster sequences to characters and collapse repeats.
pub fn dedup_sequences(seqs: &[ClusterSequence], base_codepoint: u32, k: usize) -> Result<Vec<Deduped>> {
    seqs.iter().map(|s| Ok(dedup(&clusters_to_chars(s, base_codepoint, k)?))).collect()
}

pub fn encode_all(vocab: &SubwordVocab, strings: &[CharString]) -> Vec<TokenSequence> {
    strings.par_iter().map(|s| vocab.encode(s)).collect()
}

/// Quantize, map, deduplicate and encode a whole corpus, then count tokens.
pub fn corpus_distribution(
    manifest: &CorpusManifest,
    base_dir: &Path,
    codebook: &Codebook,
    standardizer: Option<&Standardizer>,
    vocab: &SubwordVocab,
    language: &str,
) -> Result<TokenDistribution> {
    let seqs = quantize_manifest(manifest, base_dir, codebook, standardizer)?;
    let strings: Vec<CharString> =
        dedup_sequences(&seqs, vocab.base_codepoint(), vocab.k())?.into_iter().map(|d| d.string).collect();
    token_distribution(&encode_all(vocab, &strings), vocab, language)
}

/// Artifacts of [`run_pipeline`], all of which are also written to disk.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub codebook: Codebook,
    pub vocab: SubwordVocab,
    pub target: TokenDistribution,
    pub donors: Vec<TokenDistribution>,
    pub scores: Vec<SimilarityScore>,
    pub report: DonorReport,
}

/// File names inside the output directory.
pub mod files {
    pub const SUBSET: &str = "target_subset.tsv";
    pub const CODEBOOK: &str = "codebook.atcb";
    pub const STANDARDIZER: &str = "standardizer.json";
    pub const VOCAB: &str = "vocab.json";
    pub const DISTRIBUTIONS: &str = "distributions";
    pub const SIMILARITIES: &str = "similarities.json";
    pub const REPORT_TSV: &str = "report.tsv";
    pub const REPORT_JSON: &str = "report.json";
    pub const CONFIG: &str = "config.toml";
}

fn corpus_language(manifest: &CorpusManifest, path: &Path) -> Result<String> {
    manifest
        .language()
        .map(str::to_string)
        .ok_or_else(|| AtdsError::InvalidArgument(format!("{}: manifest is empty", path.display())))
}

/// Sample the target, fit the quantizer and subword model on the sample,
/// tokenize the full target and every donor corpus with them, and score each
/// donor by ATDS.
pub fn run_pipeline(cfg: &PipelineConfig, out_dir: &Path) -> Result<PipelineOutput> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir.join(files::DISTRIBUTIONS)).map_err(|e| AtdsError::io(out_dir, e))?;

    let target_dir = manifest_base_dir(&cfg.target_manifest);
    let target = load_manifest(&cfg.target_manifest)?;
    let target_lang = corpus_language(&target, &cfg.target_manifest)?;
    let donors: Vec<(CorpusManifest, PathBuf, String)> = cfg
        .donor_manifests
        .iter()
        .map(|p| {
            let m = load_manifest(p)?;
            let lang = corpus_language(&m, p)?;
            Ok((m, manifest_base_dir(p), lang))
        })
        .collect::<Result<_>>()?;
    let mut seen = BTreeSet::from([target_lang.clone()]);
    for (_, _, lang) in &donors {
        if !seen.insert(lang.clone()) {
            return Err(AtdsError::InvalidArgument(format!("language {lang} appears twice")));
        }
    }

    let subset = sample_subset(&target, cfg.hours, cfg.seed)?;
    info!("target {target_lang}: {} of {} utterances, {:.1} s", subset.len(), target.len(), subset.total_duration_s());

    let params = KMeansParams { k: cfg.k, seed: cfg.seed, max_iters: cfg.max_iters, rel_tol: cfg.rel_tol };
    let (run, standardizer) = train_quantizer(&subset, &target_dir, &params, cfg.standardize)?;
    info!(
        "k-means: {} iterations, inertia {:.6e}, converged {}",
        run.trace.len(),
        run.codebook.inertia(),
        run.converged
    );
    let codebook = run.codebook;

    let subset_seqs = quantize_manifest(&subset, &target_dir, &codebook, standardizer.as_ref())?;
    let subset_strings: Vec<CharString> =
        dedup_sequences(&subset_seqs, cfg.base_codepoint, cfg.k)?.into_iter().map(|d| d.string).collect();
    let opts = SubwordOptions {
        vocab_size: cfg.vocab_size,
        k: cfg.k,
        base_codepoint: cfg.base_codepoint,
        min_frequency: cfg.min_frequency,
    };
    let vocab = train_subword_with(&subset_strings, &opts)?;
    info!("subword vocab: {} tokens", vocab.len());

    let target_dist =
        corpus_distribution(&target, &target_dir, &codebook, standardizer.as_ref(), &vocab, &target_lang)?;
    let mut donor_dists = Vec::with_capacity(donors.len());
    let mut scores = Vec::with_capacity(donors.len());
    for (m, dir, lang) in &donors {
        let d = corpus_distribution(m, dir, &codebook, standardizer.as_ref(), &vocab, lang)?;
        let s = atds(&target_dist, &d)?;
        info!("ATDS({target_lang}, {lang}) = {:.4}", s.value);
        scores.push(s);
        donor_dists.push(d);
    }
    let entries: Vec<DonorEntry> = scores.iter().map(|s| DonorEntry::new(s.donor.clone(), s.value, None)).collect();
    let report = rank_donors(&entries, cfg.baseline_wer)?;

    write_manifest(&subset, &out_dir.join(files::SUBSET))?;
    write_codebook(&codebook, &out_dir.join(files::CODEBOOK))?;
    if let Some(st) = &standardizer {
        st.save(&out_dir.join(files::STANDARDIZER))?;
    }
    write_vocab(&vocab, &out_dir.join(files::VOCAB))?;
    for d in std::iter::once(&target_dist).chain(&donor_dists) {
        write_distribution(d, &distribution_path(out_dir, &d.language))?;
    }
    write_scores(&scores, &out_dir.join(files::SIMILARITIES))?;
    io::write_atomic(&out_dir.join(files::REPORT_TSV), report.to_tsv().as_bytes())?;
    io::write_atomic(&out_dir.join(files::REPORT_JSON), report.to_json()?.as_bytes())?;
    io::write_atomic(&out_dir.join(files::CONFIG), cfg.to_toml().as_bytes())?;

    Ok(PipelineOutput { codebook, vocab, target: target_dist, donors: donor_dists, scores, report })
}

pub fn distribution_path(out_dir: &Path, language: &str) -> PathBuf {
    out_dir.join(files::DISTRIBUTIONS).join(format!("{language}.json"))
}
