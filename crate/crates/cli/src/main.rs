//! `atds`: acoustic token distribution similarity from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "atds", version, about = "Acoustic token distribution similarity toolkit")]
struct Cli {
    /// TOML file of key = value defaults; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads (default: all cores). Outputs do not depend on this.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a seeded random subset of a manifest with a target duration.
    Sample(SampleArgs),
    /// Fit a k-means codebook on every frame of a manifest.
    TrainQuantizer(TrainQuantizerArgs),
    /// Map every frame to its nearest centroid.
    Quantize(QuantizeArgs),
    /// Learn byte-pair merges over deduplicated cluster strings.
    TrainSubword(TrainSubwordArgs),
    /// Encode cluster sequences into subword token ids.
    Tokenize(TokenizeArgs),
    /// Count token occurrences for one language.
    Distribution(DistributionArgs),
    /// Cosine similarity of token distributions.
    Atds(AtdsArgs),
    /// Cosine similarity of corpus-level mean embeddings.
    SimEmbed(SimEmbedArgs),
    /// Cosine similarity of precomputed per-language feature vectors.
    SimFeatvec(SimFeatvecArgs),
    /// Word error rate between reference and hypothesis transcripts.
    Wer(WerArgs),
    /// Relative WER reduction against a baseline.
    Werr(WerrArgs),
    /// Pearson correlation between scores and WERRs.
    Correlate(CorrelateArgs),
    /// Rank donor languages by similarity score.
    Rank(RankArgs),
    /// Token-to-phone correspondence from spans and phone alignments.
    PhoneMap(PhoneMapArgs),
    /// Target-versus-donors run from sampling to ranked report.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    hours: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct TrainQuantizerArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Directory for relative embedding paths (default: the manifest's).
    #[arg(long)]
    base_dir: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Z-score dimensions before clustering and save the fitted transform here.
    #[arg(long, value_name = "PATH")]
    standardizer: Option<PathBuf>,
    /// Codebook file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct QuantizeArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    base_dir: Option<PathBuf>,
    #[arg(long)]
    codebook: PathBuf,
    #[arg(long)]
    standardizer: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainSubwordArgs {
    /// Cluster sequences from `quantize`.
    #[arg(long)]
    clusters: PathBuf,
    /// Codebook size; read from this codebook when given.
    #[arg(long, conflicts_with = "k")]
    codebook: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    vocab_size: Option<usize>,
    #[arg(long)]
    base_codepoint: Option<u32>,
    #[arg(long)]
    min_frequency: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TokenizeArgs {
    #[arg(long)]
    clusters: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    /// Also write per-token time spans here.
    #[arg(long, value_name = "PATH")]
    spans: Option<PathBuf>,
    #[arg(long)]
    frame_rate: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DistributionArgs {
    #[arg(long)]
    tokens: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    language: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AtdsArgs {
    #[arg(long)]
    target: PathBuf,
    #[arg(long = "donor", required = true)]
    donors: Vec<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SimEmbedArgs {
    /// Target corpus manifest.
    #[arg(long)]
    target: PathBuf,
    #[arg(long = "donor", required = true)]
    donors: Vec<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SimFeatvecArgs {
    /// `language<TAB>values` file.
    #[arg(long)]
    vectors: PathBuf,
    #[arg(long)]
    target: String,
    #[arg(long = "donor", required = true)]
    donors: Vec<String>,
    /// Flag pairs whose vectors are bitwise identical.
    #[arg(long)]
    flag_identical: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct WerArgs {
    /// `utt_id<TAB>text` reference transcripts.
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long = "hyp")]
    hypothesis: PathBuf,
    #[arg(long)]
    lowercase: bool,
    #[arg(long)]
    strip_punct: bool,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct WerrArgs {
    #[arg(long, allow_negative_numbers = true)]
    baseline: f64,
    #[arg(long, allow_negative_numbers = true)]
    wer: f64,
}

#[derive(Debug, Args)]
struct CorrelateArgs {
    /// `label<TAB>score<TAB>value` rows, one per run.
    #[arg(long)]
    input: PathBuf,
    /// Treat the value column as WER and convert it to WERR first.
    #[arg(long)]
    baseline: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct RankArgs {
    /// JSON object of donor to score, or an array of entries.
    #[arg(long)]
    scores: PathBuf,
    /// JSON object of donor to observed WER.
    #[arg(long)]
    wers: Option<PathBuf>,
    #[arg(long)]
    baseline: Option<f64>,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct PhoneMapArgs {
    #[arg(long)]
    spans: PathBuf,
    /// `utt_id<TAB>start<TAB>end<TAB>phone` alignments.
    #[arg(long)]
    phones: PathBuf,
    #[arg(long)]
    frame_rate: Option<f64>,
    #[arg(long, default_value_t = 10)]
    top_tokens: usize,
    #[arg(long, default_value_t = 3)]
    top_phones: usize,
    /// Full table instead of the summary lines.
    #[arg(long)]
    tsv: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long)]
    target: Option<PathBuf>,
    #[arg(long = "donor")]
    donors: Vec<PathBuf>,
    #[arg(long)]
    hours: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    vocab_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    layer_note: Option<String>,
    #[arg(long)]
    standardize: bool,
    #[arg(long)]
    baseline: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ATDS_LOG", "info")).format_timestamp(None).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
