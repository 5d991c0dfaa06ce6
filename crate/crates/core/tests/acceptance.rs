//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

// `ensure!` negates its condition so that NaN comparisons fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use atds_core::analysis::{
    format_werr, pearson, phone_token_correspondence, rank_donors, werr, DonorEntry, PhoneInterval,
};
use atds_core::config::PipelineConfig;
use atds_core::corpus::{write_embeddings, write_manifest, CorpusManifest, EmbeddingMatrix, UtteranceRecord};
use atds_core::pipeline::run_pipeline;
use atds_core::quantizer::{train_codebook_from, Codebook, FrameSlice, KMeansParams};
use atds_core::similarity::{atds, cosine, TokenDistribution};
use atds_core::tokenizer::{train_subword_with, CharString, SubwordOptions, TokenSpan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion { name: "werr_table", budget: Duration::from_secs(1), run: werr_table },
        Criterion { name: "donor_ranking", budget: Duration::from_secs(1), run: donor_ranking },
        Criterion { name: "kmeans_oracle", budget: Duration::from_secs(10), run: kmeans_oracle },
        Criterion { name: "assignment_oracle", budget: Duration::from_secs(1), run: assignment_oracle },
        Criterion { name: "subword_oracle", budget: Duration::from_secs(10), run: subword_oracle },
        Criterion { name: "atds_properties", budget: Duration::from_secs(10), run: atds_properties },
        Criterion { name: "atds_synthetic_separation", budget: Duration::from_secs(600), run: atds_separation },
        Criterion { name: "pipeline_runtime_single_core", budget: Duration::from_secs(60), run: pipeline_runtime },
        Criterion { name: "pearson_cosine_identities", budget: Duration::from_secs(10), run: identities },
        Criterion { name: "token_phone_correspondence", budget: Duration::from_secs(10), run: correspondence },
        Criterion { name: "determinism", budget: Duration::from_secs(600), run: determinism },
    ];

    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let t = Instant::now();
        let outcome = match panic::catch_unwind(AssertUnwindSafe(c.run)) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let elapsed = t.elapsed();
        let outcome = outcome.and_then(|()| {
            if elapsed > c.budget {
                Err(format!("took {:.2?}, budget {:.0?}", elapsed, c.budget))
            } else {
                Ok(())
            }
        });
        match outcome {
            Ok(()) => println!("PASS {:<30} {:>9.3?}", c.name, elapsed),
            Err(e) => {
                failed += 1;
                println!("FAIL {:<30} {:>9.3?}  {e}", c.name, elapsed);
            }
        }
    }
    println!("{} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn werr_table() -> Check {
    let table =
        [(22.2, 11.2), (23.5, 6.0), (24.4, 2.4), (24.6, 1.6), (25.0, 0.0), (25.1, -0.4), (25.2, -0.8), (30.8, -23.2)];
    for (wer, expected) in table {
        let got = werr(25.0, wer).map_err(|e| e.to_string())?;
        let shown = format_werr(got);
        let rounded: f64 = shown.trim_end_matches('%').parse().unwrap();
        ensure!((rounded - expected).abs() <= 0.05, "WER {wer}: got {shown}, expected {expected:.1}%");
    }
    Ok(())
}

fn donor_ranking() -> Check {
    let fixtures: [(&str, [(&str, f64); 2]); 3] = [
        ("Galician", [("Por", 0.89), ("Spa", 0.96)]),
        ("Iban", [("Ind", 0.88), ("Zsm", 0.91)]),
        ("Setswana", [("Nso", 0.88), ("Sot", 0.96)]),
    ];
    let expected = [["Spa", "Por"], ["Zsm", "Ind"], ["Sot", "Nso"]];
    for ((target, donors), want) in fixtures.iter().zip(expected) {
        let entries: Vec<DonorEntry> = donors.iter().map(|(d, s)| DonorEntry::new(*d, *s, None)).collect();
        let report = rank_donors(&entries, None).map_err(|e| e.to_string())?;
        let got: Vec<&str> = report.donors.iter().map(|d| d.donor.as_str()).collect();
        ensure!(got == want, "{target}: got {got:?}, expected {want:?}");
    }
    Ok(())
}

/// Plain Lloyd iterations from explicit seeds until assignments stop changing.
fn oracle_lloyd(points: &[[f64; 2]], mut c: Vec<[f64; 2]>) -> f64 {
    let k = c.len();
    let mut labels = vec![usize::MAX; points.len()];
    loop {
        let mut changed = false;
        for (p, l) in points.iter().zip(labels.iter_mut()) {
            let mut best = 0;
            let mut bd = f64::INFINITY;
            for (j, cj) in c.iter().enumerate() {
                let d = (p[0] - cj[0]).powi(2) + (p[1] - cj[1]).powi(2);
                if d < bd {
                    bd = d;
                    best = j;
                }
            }
            if *l != best {
                *l = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![[0.0f64; 2]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            sums[l][0] += p[0];
            sums[l][1] += p[1];
            counts[l] += 1;
        }
        for j in 0..k {
            if counts[j] > 0 {
                c[j] = [sums[j][0] / counts[j] as f64, sums[j][1] / counts[j] as f64];
            }
        }
    }
    points.iter().zip(&labels).map(|(p, &l)| (p[0] - c[l][0]).powi(2) + (p[1] - c[l][1]).powi(2)).sum()
}

fn kmeans_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let unit = Normal::new(0.0, 1.0).unwrap();
    for instance in 0..20 {
        let centers: Vec<[f64; 2]> = (0..2).map(|_| [rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0)]).collect();
        let mut data = Vec::with_capacity(400);
        for i in 0..200 {
            let c = centers[i % 2];
            data.push((c[0] + unit.sample(&mut rng)) as f32);
            data.push((c[1] + unit.sample(&mut rng)) as f32);
        }
        let points: Vec<[f64; 2]> = data.chunks(2).map(|r| [r[0] as f64, r[1] as f64]).collect();

        let mut best = f64::INFINITY;
        for _ in 0..50 {
            let a = rng.gen_range(0..200);
            let mut b = rng.gen_range(0..199);
            if b >= a {
                b += 1;
            }
            best = best.min(oracle_lloyd(&points, vec![points[a], points[b]]));
        }

        let run = train_codebook_from(&FrameSlice::new(&data, 2).unwrap(), &KMeansParams::new(2, instance))
            .map_err(|e| e.to_string())?;
        let got = run.codebook.inertia();
        ensure!(
            (got - best).abs() <= 1e-9 * best,
            "instance {instance}: inertia {got} vs oracle {best} (rel {:.3e})",
            (got - best).abs() / best
        );
        ensure!(run.trace.windows(2).all(|w| w[1] <= w[0]), "instance {instance}: non-monotone trace {:?}", run.trace);
    }
    Ok(())
}

fn assignment_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let unit = Normal::new(0.0f32, 1.0).unwrap();
    let (k, dim, n) = (50, 16, 1000);
    let centroids: Vec<f32> = (0..k * dim).map(|_| unit.sample(&mut rng)).collect();
    let frames: Vec<f32> = (0..n * dim).map(|_| unit.sample(&mut rng)).collect();
    let cb = Codebook::new(centroids.clone(), k, dim, 0, 0.0).map_err(|e| e.to_string())?;
    let got = cb.assign_rows(&frames).map_err(|e| e.to_string())?;
    for (i, row) in frames.chunks(dim).enumerate() {
        let mut best = 0u32;
        let mut bd = f64::INFINITY;
        for j in 0..k {
            let d: f64 =
                row.iter().zip(&centroids[j * dim..(j + 1) * dim]).map(|(&x, &c)| (x as f64 - c as f64).powi(2)).sum();
            if d < bd {
                bd = d;
                best = j as u32;
            }
        }
        ensure!(got[i] == best, "frame {i}: got {}, exhaustive scan {best}", got[i]);
    }
    Ok(())
}

fn subword_oracle() -> Check {
    let corpus = vec![CharString::new("u0", "abab"), CharString::new("u1", "abc")];
    let opts = SubwordOptions { vocab_size: 100, k: 3, base_codepoint: 'a' as u32, min_frequency: 1 };
    let v = train_subword_with(&corpus, &opts).map_err(|e| e.to_string())?;
    let merges = v.merges();
    ensure!(merges.len() >= 2, "only {} merges", merges.len());
    ensure!(merges[0] == ("a".into(), "b".into()) && merges[1] == ("ab".into(), "ab".into()), "merges {merges:?}");

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let base = 0x4E00u32;
    let random_string = |rng: &mut ChaCha8Rng, k: usize, len: usize| -> String {
        (0..len).map(|_| char::from_u32(base + rng.gen_range(0..k as u32)).unwrap()).collect()
    };
    for vocab_no in 0..20 {
        let k = rng.gen_range(2..12);
        let train: Vec<CharString> = (0..60)
            .map(|i| {
                let len = rng.gen_range(1..40);
                CharString::new(format!("t{i}"), &random_string(&mut rng, k, len))
            })
            .collect();
        let vocab_size = k + 1 + rng.gen_range(0..200);
        let opts = SubwordOptions { vocab_size, k, base_codepoint: base, min_frequency: rng.gen_range(1..3) };
        let v = train_subword_with(&train, &opts).map_err(|e| e.to_string())?;
        for i in 0..1000 {
            let len = rng.gen_range(0..60);
            let s = CharString::new(format!("s{i}"), &random_string(&mut rng, k, len));
            let enc = v.encode(&s);
            ensure!(!enc.ids.contains(&0), "vocab {vocab_no}: UNK in encoding of in-alphabet string");
            let dec = v.decode(&enc.ids);
            ensure!(dec == s.as_string(), "vocab {vocab_no}: {:?} decoded to {dec:?}", s.as_string());
        }
    }
    Ok(())
}

fn random_dist(rng: &mut ChaCha8Rng, len: usize, fp: u64) -> TokenDistribution {
    let counts = (0..len).map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(0..1000) }).collect();
    TokenDistribution::from_counts("x", fp, counts).unwrap()
}

fn atds_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fp = 0xABCD;
    for _ in 0..500 {
        let len = rng.gen_range(3..300);
        let a = random_dist(&mut rng, len, fp);
        let b = random_dist(&mut rng, len, fp);
        if a.counts[1..].iter().all(|&c| c == 0) || b.counts[1..].iter().all(|&c| c == 0) {
            continue;
        }
        let ab = atds(&a, &b).map_err(|e| e.to_string())?.value;
        let ba = atds(&b, &a).map_err(|e| e.to_string())?.value;
        ensure!(ab.to_bits() == ba.to_bits(), "asymmetric: {ab} vs {ba}");
        let aa = atds(&a, &a).map_err(|e| e.to_string())?.value;
        ensure!(aa == 1.0, "self-similarity {aa}");
        let scale = rng.gen_range(2..1000u64);
        let scaled = TokenDistribution::from_counts("y", fp, a.counts.iter().map(|c| c * scale).collect()).unwrap();
        let s = atds(&scaled, &b).map_err(|e| e.to_string())?.value;
        ensure!((s - ab).abs() <= 1e-12, "scaling by {scale}: {s} vs {ab}");

        // Disjoint supports, UNK mass on both sides.
        let mut c = vec![0u64; len];
        let mut d = vec![0u64; len];
        c[0] = 5;
        d[0] = 9;
        for i in 1..len {
            if i % 2 == 0 {
                c[i] = rng.gen_range(1..50);
            } else {
                d[i] = rng.gen_range(1..50);
            }
        }
        let c = TokenDistribution::from_counts("c", fp, c).unwrap();
        let d = TokenDistribution::from_counts("d", fp, d).unwrap();
        let cd = atds(&c, &d).map_err(|e| e.to_string())?.value;
        ensure!(cd == 0.0, "disjoint supports gave {cd}");
    }
    Ok(())
}

/// A Gaussian-mixture "language": utterances are runs of frames around
/// component means, like phones.
struct Language {
    means: Vec<Vec<f64>>,
    sigma: f64,
}

impl Language {
    fn new(rng: &mut ChaCha8Rng, components: usize, dim: usize) -> Self {
        let spread = Normal::new(0.0, 3.0).unwrap();
        Self { means: (0..components).map(|_| (0..dim).map(|_| spread.sample(rng)).collect()).collect(), sigma: 1.0 }
    }

    fn shifted(&self, rng: &mut ChaCha8Rng, offset: f64) -> Self {
        let dim = self.means[0].len();
        let unit = Normal::new(0.0, 1.0).unwrap();
        let dir: Vec<f64> = (0..dim).map(|_| unit.sample(rng)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        let means = self
            .means
            .iter()
            .map(|m| m.iter().zip(&dir).map(|(x, d)| x + offset * self.sigma * d / norm).collect())
            .collect();
        Self { means, sigma: self.sigma }
    }

    /// Writes `.ate` files and a manifest; returns the manifest path.
    fn write_corpus(
        &self,
        rng: &mut ChaCha8Rng,
        dir: &Path,
        lang: &str,
        utterances: usize,
        frames_per_utt: usize,
    ) -> PathBuf {
        let dim = self.means[0].len();
        let noise = Normal::new(0.0, self.sigma).unwrap();
        let mut recs = Vec::with_capacity(utterances);
        for u in 0..utterances {
            let mut data = Vec::with_capacity(frames_per_utt * dim);
            let mut left = 0;
            let mut comp = 0;
            for _ in 0..frames_per_utt {
                if left == 0 {
                    comp = rng.gen_range(0..self.means.len());
                    left = rng.gen_range(3..12);
                }
                left -= 1;
                data.extend(self.means[comp].iter().map(|m| (m + noise.sample(rng)) as f32));
            }
            let name = format!("{lang}/{u:05}.ate");
            let m = EmbeddingMatrix::new(data, frames_per_utt, dim, 49.0).unwrap();
            write_embeddings(&m, &dir.join(&name)).unwrap();
            recs.push(
                UtteranceRecord::new(format!("{lang}_{u:05}"), name, frames_per_utt as f64 / 49.0, lang).unwrap(),
            );
        }
        let path = dir.join(format!("{lang}.tsv"));
        write_manifest(&CorpusManifest::new(recs).unwrap(), &path).unwrap();
        path
    }
}

const DIM: usize = 16;
const FRAMES_PER_UTT: usize = 245;
/// 205 utterances of 245 frames: just over 50k frames per corpus.
const UTTERANCES: usize = 205;

/// Target, same-mixture donor B and shifted donor C.
fn synthetic_setup(seed: u64, dir: &Path) -> PipelineConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::fs::create_dir_all(dir.join("tgt")).unwrap();
    std::fs::create_dir_all(dir.join("B")).unwrap();
    std::fs::create_dir_all(dir.join("C")).unwrap();
    let lang = Language::new(&mut rng, 40, DIM);
    let shifted = lang.shifted(&mut rng, 4.0);
    let target = lang.write_corpus(&mut rng, dir, "tgt", UTTERANCES, FRAMES_PER_UTT);
    let b = lang.write_corpus(&mut rng, dir, "B", UTTERANCES, FRAMES_PER_UTT);
    let c = shifted.write_corpus(&mut rng, dir, "C", UTTERANCES, FRAMES_PER_UTT);
    PipelineConfig {
        target_manifest: target,
        donor_manifests: vec![b, c],
        hours: 0.25,
        seed,
        layer_note: "synthetic gaussian mixture".into(),
        ..PipelineConfig::default()
    }
}

fn atds_separation() -> Check {
    let mut line = Vec::new();
    for seed in 1..=5 {
        let dir = tempfile::tempdir().unwrap();
        let cfg = synthetic_setup(seed, dir.path());
        let out = run_pipeline(&cfg, &dir.path().join("out")).map_err(|e| e.to_string())?;
        let score = |d: &str| out.scores.iter().find(|s| s.donor == d).unwrap().value;
        let (b, c) = (score("B"), score("C"));
        line.push(format!("{b:.3}/{c:.3}"));
        ensure!(b > c, "seed {seed}: ATDS(B) = {b} <= ATDS(C) = {c}");
    }
    eprintln!("  separation B/C per seed: {}", line.join(" "));
    Ok(())
}

fn pipeline_runtime() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synthetic_setup(42, dir.path());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let t = Instant::now();
    pool.install(|| run_pipeline(&cfg, &dir.path().join("out"))).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    eprintln!("  single-core pipeline, k={} V={}: {elapsed:.2?}", cfg.k, cfg.vocab_size);
    ensure!(elapsed < Duration::from_secs(60), "pipeline took {elapsed:.2?}");
    Ok(())
}

fn identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let n = rng.gen_range(3..50);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let r = pearson(&x, &y).map_err(|e| e.to_string())?;
        let (a, b) = (rng.gen_range(0.01..50.0), rng.gen_range(-100.0..100.0));
        let xa: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let ra = pearson(&xa, &y).unwrap();
        ensure!((ra - r).abs() <= 1e-12, "affine: {ra} vs {r}");
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let rn = pearson(&x, &neg).unwrap();
        ensure!((rn + r).abs() <= 1e-12, "sign flip: {rn} vs {r}");
        let rs = pearson(&x, &x).unwrap();
        ensure!((rs - 1.0).abs() <= 1e-12, "self-correlation {rs}");

        let cxy = cosine(&x, &y).unwrap();
        let cyx = cosine(&y, &x).unwrap();
        ensure!(cxy == cyx, "cosine asymmetric");
        let cs = cosine(&x, &x).unwrap();
        ensure!((cs - 1.0).abs() <= 1e-12, "cosine self {cs}");
        let xs: Vec<f64> = x.iter().map(|v| a * v).collect();
        let cx = cosine(&xs, &y).unwrap();
        ensure!((cx - cxy).abs() <= 1e-12, "cosine scale: {cx} vs {cxy}");
        let cneg = cosine(&x, &neg).unwrap();
        ensure!((cneg + cxy).abs() <= 1e-12, "cosine sign flip");
    }
    Ok(())
}

fn correspondence() -> Check {
    const HZ: f64 = 49.0;
    let span = |t: u32, a: u32, b: u32| TokenSpan { token_id: t, start_s: a as f64 / HZ, end_s: b as f64 / HZ };
    let iv = |a: f64, b: f64, p: &str| PhoneInterval { start_s: a, end_s: b, phone: p.into() };
    let one = |spans: Vec<TokenSpan>, ivs: Vec<PhoneInterval>| {
        phone_token_correspondence(
            &BTreeMap::from([("u".to_string(), spans)]),
            &BTreeMap::from([("u".to_string(), ivs)]),
            HZ,
        )
        .unwrap()
    };

    let t = one(vec![span(4, 0, 5)], vec![iv(0.0, 1.0, "ɑ")]);
    ensure!(t.distribution(4) == vec![("ɑ".to_string(), 1.0)], "certain case: {:?}", t.distribution(4));
    ensure!(t.render(1, 1) == "P(/ɑ/|t1) = 1.00\n", "render {:?}", t.render(1, 1));

    let t = one(vec![span(9, 0, 3)], vec![iv(0.0, 2.0 / HZ, "a"), iv(2.0 / HZ, 1.0, "e")]);
    let d = t.distribution(9);
    ensure!(d.len() == 2 && d[0].0 == "a" && d[1].0 == "e", "{d:?}");
    ensure!(d[0].1 == 2.0 / 3.0 && d[1].1 == 1.0 / 3.0, "split case {d:?}");
    ensure!(t.render(1, 2) == "P(/a/|t1) = 0.67\nP(/e/|t1) = 0.33\n", "render {:?}", t.render(1, 2));

    // Random spans over random alignments: every row sums to one.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phones = ["a", "e", "i", "o", "u", "s", "t"];
    let mut spans = BTreeMap::new();
    let mut ivs = BTreeMap::new();
    for u in 0..50 {
        let mut f = 0;
        let mut s = Vec::new();
        while f < 400 {
            let n = rng.gen_range(1..9);
            s.push(span(rng.gen_range(1..30), f, f + n));
            f += n;
        }
        let mut t = rng.gen_range(0.0..0.1);
        let mut v = Vec::new();
        while t < 8.0 {
            let len = rng.gen_range(0.01..0.2);
            v.push(iv(t, t + len, phones[rng.gen_range(0..phones.len())]));
            t += len + if rng.gen_bool(0.2) { rng.gen_range(0.0..0.1) } else { 0.0 };
        }
        spans.insert(format!("u{u}"), s);
        ivs.insert(format!("u{u}"), v);
    }
    let t = phone_token_correspondence(&spans, &ivs, HZ).map_err(|e| e.to_string())?;
    for tok in t.ranked_tokens() {
        let sum: f64 = t.distribution(tok).iter().map(|x| x.1).sum();
        ensure!((sum - 1.0).abs() <= 1e-9, "token {tok} row sums to {sum}");
    }
    for line in t.render(5, 3).lines() {
        let ok = line.starts_with("P(/") && line.contains("/|t") && line.contains(") = ");
        ensure!(ok, "unexpected line {line:?}");
    }
    Ok(())
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synthetic_setup(8, dir.path());
    let (a, b) = (dir.path().join("run_a"), dir.path().join("run_b"));
    run_pipeline(&cfg, &a).map_err(|e| e.to_string())?;
    // Second run on a different worker count.
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    pool.install(|| run_pipeline(&cfg, &b)).map_err(|e| e.to_string())?;
    let fa = files_under(&a);
    ensure!(fa == files_under(&b), "different file sets");
    for expected in ["codebook.atcb", "vocab.json", "report.tsv", "report.json", "similarities.json"] {
        ensure!(fa.iter().any(|p| p == Path::new(expected)), "missing {expected}");
    }
    ensure!(fa.iter().filter(|p| p.starts_with("distributions")).count() == 3, "distribution files");
    for f in &fa {
        ensure!(std::fs::read(a.join(f)).unwrap() == std::fs::read(b.join(f)).unwrap(), "{} differs", f.display());
    }
    Ok(())
}
