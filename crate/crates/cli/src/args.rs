use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "valuekit", version, about = "Value-dimension curation, modeling and dialogue rewards")]
pub struct Cli {
    /// Seed for every randomized step; recorded in output metadata.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// TOML file with default parameters; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Increase log verbosity (-v info, -vv debug, -vvv trace).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dataset curation steps.
    #[command(subcommand)]
    Curate(Curate),
    /// Train a value model on a sample file.
    Train(TrainArgs),
    /// Evaluate a model and write the metric report.
    Eval(EvalArgs),
    /// Score texts into ten-dimensional value vectors.
    Score(ScoreArgs),
    /// Build a speaker profile from utterances.
    Profile(ProfileArgs),
    /// Compute the persona value-matching reward for a dialogue.
    Reward(RewardArgs),
    /// Rank candidate responses by reward gain.
    Rerank(RerankArgs),
    /// Serve scoring, reward and profile endpoints over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
pub enum Curate {
    /// Tag scenarios with the dimensions whose keywords they contain.
    Match(MatchArgs),
    /// Add embedding neighbours of definitional keywords to a lexicon.
    Expand(ExpandArgs),
    /// Add word-association service results to a lexicon.
    Associations(AssociationsArgs),
    /// Majority-vote raw annotations into samples.
    Aggregate(AggregateArgs),
    /// Fleiss' kappa over raw annotations.
    Kappa(KappaArgs),
    /// Stratified train/valid/test split.
    Split(SplitArgs),
    /// Down-sample negative and neutral benevolence samples.
    Balance(BalanceArgs),
    /// Relabel low-agreement groups as unrelated.
    Augment(AugmentArgs),
    /// Convert a column-mapped CSV file to the sample format.
    ImportCsv(ImportCsvArgs),
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    /// Scenario file, one per line (optionally `id<TAB>text`).
    #[arg(long)]
    pub input: PathBuf,
    /// Lexicon file; the built-in lexicon is used when omitted.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Word vectors in the `word v1 … vD` text format.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Neighbours per keyword.
    #[arg(long)]
    pub k: Option<usize>,
    /// Minimum cosine similarity.
    #[arg(long)]
    pub min_sim: Option<f64>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AssociationsArgs {
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Association service endpoint.
    #[arg(long, env = "VALUEKIT_ENDPOINT")]
    pub endpoint: Option<String>,
    /// Response cache directory.
    #[arg(long, env = "VALUEKIT_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Associations kept per keyword.
    #[arg(long)]
    pub per_keyword: Option<usize>,
    /// Request timeout in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// Raw annotations, one JSON record per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Report of dropped groups; defaults to `<output>.dropped.tsv`.
    #[arg(long)]
    pub dropped: Option<PathBuf>,
    #[arg(long)]
    pub min_agree: Option<u32>,
}

#[derive(Debug, Args)]
pub struct KappaArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Optional JSON agreement report.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Samples, one JSON record per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Receives train.jsonl, valid.jsonl and test.jsonl.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Train,valid,test fractions.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub ratios: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct BalanceArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Raw annotations.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImportCsvArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// TOML column mapping; falls back to the `[import]` table of --config.
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Regression,
    Classification,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training samples.
    #[arg(long)]
    pub train: PathBuf,
    /// Validation samples, evaluated after training.
    #[arg(long)]
    pub valid: Option<PathBuf>,
    /// Model file to write.
    #[arg(long)]
    pub output: PathBuf,
    /// Loss trace; defaults to `<output>.loss.tsv`.
    #[arg(long)]
    pub loss_trace: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Samples per update; 0 means full batch.
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub hash_dim: Option<usize>,
    #[arg(long)]
    pub embed_dim: Option<usize>,
    #[arg(long)]
    pub ngram_order: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Text report.
    #[arg(long)]
    pub output: PathBuf,
    /// Machine-readable report; defaults to `<output>.json`.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Where value vectors come from.
#[derive(Debug, Args)]
pub struct ScorerArgs {
    /// Model file for in-process scoring.
    #[arg(long, conflicts_with = "endpoint")]
    pub model: Option<PathBuf>,
    /// Base URL of a running `valuekit serve`.
    #[arg(long, env = "VALUEKIT_ENDPOINT")]
    pub endpoint: Option<String>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub scorer: ScorerArgs,
    /// Texts, one per line; `-` reads standard input.
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub scorer: ScorerArgs,
    /// Utterances, one per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Radar plot data; defaults to `<output>.radar.tsv`.
    #[arg(long)]
    pub radar: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RewardArgs {
    #[command(flatten)]
    pub scorer: ScorerArgs,
    /// Persona sentences, one per line.
    #[arg(long)]
    pub persona: PathBuf,
    /// Agent utterances, one per line.
    #[arg(long)]
    pub utterances: PathBuf,
    /// Bound every per-turn term to [-1, 1].
    #[arg(long)]
    pub clamp_terms: bool,
    /// Audit trace.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RerankArgs {
    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[arg(long)]
    pub persona: PathBuf,
    /// Utterances already in the dialogue.
    #[arg(long)]
    pub prior: Option<PathBuf>,
    /// Candidate responses, one per line.
    #[arg(long)]
    pub candidates: PathBuf,
    #[arg(long)]
    pub clamp_terms: bool,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Address to listen on.
    #[arg(long)]
    pub bind: Option<String>,
    /// Request body limit in bytes.
    #[arg(long)]
    pub body_limit: Option<usize>,
    /// Requests handled concurrently before answering 503.
    #[arg(long)]
    pub concurrency: Option<usize>,
}
