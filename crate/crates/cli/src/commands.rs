use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use atds_core::analysis::{
    corpus_wer, format_werr, pearson, phone_token_correspondence, rank_donors, read_donor_entries,
    read_phone_intervals, read_transcripts, tokenize_words, wer, werr, WerOptions,
};
use atds_core::config::PipelineConfig;
use atds_core::corpus::{load_manifest, read_embeddings, sample_subset, CorpusManifest};
use atds_core::io::{read_to_string, write_atomic};
use atds_core::pipeline::{
    dedup_sequences, encode_all, manifest_base_dir, quantize_manifest, run_pipeline, train_quantizer,
};
use atds_core::quantizer::{
    read_cluster_sequences, read_codebook, write_cluster_sequences, write_codebook, KMeansParams, Standardizer,
};
use atds_core::similarity::{
    atds, feature_vector_similarity, mean_embedding_similarity, read_distribution, read_feature_vectors,
    scores_to_json, token_distribution, write_distribution,
};
use atds_core::tokenizer::{
    read_spans, read_token_sequences, read_vocab, token_spans, train_subword_with, write_spans, write_token_sequences,
    write_vocab, CharString, SubwordOptions, UtteranceSpans,
};
use atds_core::{AtdsError, Result};
use log::{info, warn};

use crate::{Cli, Command};

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(invalid("--jobs must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| invalid(e.to_string()))?;
    }
    let cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };

    match cli.command {
        Command::Sample(a) => {
            let manifest = load_manifest(&a.manifest)?;
            let subset = sample_subset(&manifest, a.hours.unwrap_or(cfg.hours), a.seed.unwrap_or(cfg.seed))?;
            info!("{} of {} utterances, {:.1} s", subset.len(), manifest.len(), subset.total_duration_s());
            emit(a.output.out.as_deref(), &subset.to_tsv())
        }

        Command::TrainQuantizer(a) => {
            let manifest = load_manifest(&a.manifest)?;
            let base = a.base_dir.unwrap_or_else(|| manifest_base_dir(&a.manifest));
            let params = KMeansParams {
                k: a.k.unwrap_or(cfg.k),
                seed: a.seed.unwrap_or(cfg.seed),
                max_iters: a.max_iters.unwrap_or(cfg.max_iters),
                rel_tol: a.rel_tol.unwrap_or(cfg.rel_tol),
            };
            params.validate()?;
            let (run, st) = train_quantizer(&manifest, &base, &params, a.standardizer.is_some())?;
            info!(
                "{} iterations, inertia {:.6e} (initial {:.6e}), converged {}",
                run.trace.len(),
                run.codebook.inertia(),
                run.init_inertia,
                run.converged
            );
            write_codebook(&run.codebook, &a.out)?;
            if let (Some(path), Some(st)) = (&a.standardizer, &st) {
                st.save(path)?;
            }
            Ok(())
        }

        Command::Quantize(a) => {
            let manifest = load_manifest(&a.manifest)?;
            let base = a.base_dir.unwrap_or_else(|| manifest_base_dir(&a.manifest));
            let codebook = read_codebook(&a.codebook)?;
            let st = a.standardizer.as_deref().map(Standardizer::load).transpose()?;
            let seqs = quantize_manifest(&manifest, &base, &codebook, st.as_ref())?;
            write_cluster_sequences(&seqs, &a.out)
        }

        Command::TrainSubword(a) => {
            let seqs = read_cluster_sequences(&a.clusters)?;
            let k = match &a.codebook {
                Some(p) => read_codebook(p)?.k(),
                None => a.k.unwrap_or(cfg.k),
            };
            let opts = SubwordOptions {
                vocab_size: a.vocab_size.unwrap_or(cfg.vocab_size),
                k,
                base_codepoint: a.base_codepoint.unwrap_or(cfg.base_codepoint),
                min_frequency: a.min_frequency.unwrap_or(cfg.min_frequency),
            };
            opts.validate()?;
            let strings = strings_of(dedup_sequences(&seqs, opts.base_codepoint, k)?);
            let vocab = train_subword_with(&strings, &opts)?;
            info!("{} tokens, {} merges", vocab.len(), vocab.merges().len());
            write_vocab(&vocab, &a.out)
        }

        Command::Tokenize(a) => {
            let seqs = read_cluster_sequences(&a.clusters)?;
            let vocab = read_vocab(&a.vocab)?;
            let deduped = dedup_sequences(&seqs, vocab.base_codepoint(), vocab.k())?;
            let strings: Vec<CharString> = deduped.iter().map(|d| d.string.clone()).collect();
            let tokens = encode_all(&vocab, &strings);
            write_token_sequences(&tokens, &a.out)?;
            if let Some(path) = &a.spans {
                let rate = a.frame_rate.unwrap_or(cfg.frame_rate_hz);
                let spans = tokens
                    .iter()
                    .zip(&deduped)
                    .map(|(t, d)| {
                        Ok(UtteranceSpans {
                            utt_id: t.utt_id.clone(),
                            spans: token_spans(&vocab, t, &d.run_lengths, rate)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                write_spans(&spans, path)?;
            }
            Ok(())
        }

        Command::Distribution(a) => {
            let tokens = read_token_sequences(&a.tokens)?;
            let vocab = read_vocab(&a.vocab)?;
            write_distribution(&token_distribution(&tokens, &vocab, &a.language)?, &a.out)
        }

        Command::Atds(a) => {
            let target = read_distribution(&a.target)?;
            let scores = a.donors.iter().map(|p| atds(&target, &read_distribution(p)?)).collect::<Result<Vec<_>>>()?;
            emit(a.output.out.as_deref(), &scores_to_json(&scores))
        }

        Command::SimEmbed(a) => {
            let (target_lang, target) = utterance_means(&a.target)?;
            let mut scores = Vec::new();
            for p in &a.donors {
                let (lang, means) = utterance_means(p)?;
                scores.push(mean_embedding_similarity(&target, &means)?.between(target_lang.clone(), lang));
            }
            emit(a.output.out.as_deref(), &scores_to_json(&scores))
        }

        Command::SimFeatvec(a) => {
            let vectors = read_feature_vectors(&a.vectors)?;
            let get = |lang: &str| vectors.get(lang).ok_or_else(|| invalid(format!("no feature vector for {lang}")));
            let target = get(&a.target)?;
            let mut scores = Vec::new();
            for d in &a.donors {
                let s = feature_vector_similarity(target, get(d)?, a.flag_identical)?;
                scores.push(s.between(a.target.clone(), d.clone()));
            }
            emit(a.output.out.as_deref(), &scores_to_json(&scores))
        }

        Command::Wer(a) => {
            let refs = read_transcripts(&a.reference)?;
            let hyps = read_transcripts(&a.hypothesis)?;
            let opts = WerOptions { lowercase: a.lowercase, strip_punctuation: a.strip_punct };
            let mut results = Vec::new();
            for (id, text) in &refs {
                let r = tokenize_words(text, opts);
                if r.is_empty() {
                    warn!("{id}: empty reference, skipped");
                    continue;
                }
                let h = match hyps.get(id) {
                    Some(t) => tokenize_words(t, opts),
                    None => {
                        warn!("{id}: no hypothesis, counted as all deletions");
                        Vec::new()
                    }
                };
                results.push(wer(&r, &h)?);
            }
            for id in hyps.keys().filter(|id| !refs.contains_key(*id)) {
                warn!("{id}: hypothesis without reference, ignored");
            }
            let total = corpus_wer(&results)?;
            let text = if a.json {
                let mut s = serde_json::to_string_pretty(&total).map_err(AtdsError::from)?;
                s.push('\n');
                s
            } else {
                format!(
                    "WER {:.2}% (S={} I={} D={} N={}, {} utterances)\n",
                    total.wer * 100.0,
                    total.substitutions,
                    total.insertions,
                    total.deletions,
                    total.ref_words,
                    results.len()
                )
            };
            emit(a.output.out.as_deref(), &text)
        }

        Command::Werr(a) => emit(None, &format!("{}\n", format_werr(werr(a.baseline, a.wer)?))),

        Command::Correlate(a) => {
            let (xs, ys) = read_pairs(&a.input, a.baseline)?;
            let r = pearson(&xs, &ys)?;
            emit(a.output.out.as_deref(), &format!("r = {r:.4} (n = {})\n", xs.len()))
        }

        Command::Rank(a) => {
            let mut entries = read_donor_entries(&a.scores)?;
            if let Some(p) = &a.wers {
                let wers: BTreeMap<String, f64> = serde_json::from_str(&read_to_string(p)?).map_err(AtdsError::from)?;
                for e in entries.iter_mut() {
                    if let Some(&w) = wers.get(&e.donor) {
                        e.wer = Some(w);
                    }
                }
            }
            let report = rank_donors(&entries, a.baseline.or(cfg.baseline_wer))?;
            let text = if a.json { report.to_json()? } else { report.to_tsv() };
            emit(a.output.out.as_deref(), &text)
        }

        Command::PhoneMap(a) => {
            let spans = read_spans(&a.spans)?;
            let phones = read_phone_intervals(&a.phones)?;
            let table = phone_token_correspondence(&spans, &phones, a.frame_rate.unwrap_or(cfg.frame_rate_hz))?;
            let text = if a.tsv { table.to_tsv() } else { table.render(a.top_tokens, a.top_phones) };
            emit(a.output.out.as_deref(), &text)
        }

        Command::Pipeline(a) => {
            let mut cfg = cfg;
            if let Some(t) = a.target {
                cfg.target_manifest = t;
            }
            if !a.donors.is_empty() {
                cfg.donor_manifests = a.donors;
            }
            cfg.hours = a.hours.unwrap_or(cfg.hours);
            cfg.k = a.k.unwrap_or(cfg.k);
            cfg.vocab_size = a.vocab_size.unwrap_or(cfg.vocab_size);
            cfg.seed = a.seed.unwrap_or(cfg.seed);
            cfg.standardize |= a.standardize;
            cfg.baseline_wer = a.baseline.or(cfg.baseline_wer);
            if let Some(n) = a.layer_note {
                cfg.layer_note = n;
            }
            if cfg.donor_manifests.is_empty() {
                return Err(invalid("at least one donor manifest is required"));
            }
            let out = run_pipeline(&cfg, &a.out)?;
            emit(None, &out.report.to_tsv())
        }
    }
}

fn invalid(msg: impl Into<String>) -> AtdsError {
    AtdsError::InvalidArgument(msg.into())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| AtdsError::Io { path: PathBuf::from("<stdout>"), source: e })
        }
    }
}

fn strings_of(deduped: Vec<atds_core::tokenizer::Deduped>) -> Vec<CharString> {
    deduped.into_iter().map(|d| d.string).collect()
}

/// Language label and per-utterance mean embeddings of a corpus.
fn utterance_means(manifest_path: &Path) -> Result<(String, Vec<Vec<f64>>)> {
    let manifest: CorpusManifest = load_manifest(manifest_path)?;
    let base = manifest_base_dir(manifest_path);
    let lang = manifest.language().unwrap_or_default().to_string();
    let means = manifest
        .records()
        .iter()
        .map(|r| {
            read_embeddings(&base.join(&r.path))?.mean_row().ok_or(AtdsError::EmptyInput("utterance without frames"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((lang, means))
}

/// `label<TAB>score<TAB>value` rows; with a baseline the value is a WER and
/// is converted to WERR.
fn read_pairs(path: &Path, baseline: Option<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = read_to_string(path)?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let parse = |s: &str| {
            s.trim().parse::<f64>().map_err(|_| AtdsError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("bad number '{s}'"),
            })
        };
        if cols.len() != 3 {
            return Err(AtdsError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("expected 3 columns, found {}", cols.len()),
            });
        }
        xs.push(parse(cols[1])?);
        let v = parse(cols[2])?;
        ys.push(match baseline {
            Some(b) => werr(b, v)?,
            None => v,
        });
    }
    Ok((xs, ys))
}
