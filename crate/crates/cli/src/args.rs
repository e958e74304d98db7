use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "dirparadox",
    version,
    about = "Friendship-paradox analytics and polling experiments on directed graphs"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Edge list: one `src<TAB>dst` link per line, `#` comments.
    #[arg(long, global = true)]
    pub edges: Option<PathBuf>,
    /// Attribute file: one `node<TAB>attribute` membership per line.
    #[arg(long, global = true)]
    pub attrs: Option<PathBuf>,
    /// Write machine-readable output here and print a summary instead.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Drop attribute members that are not nodes of the graph.
    #[arg(long, global = true)]
    pub skip_unknown: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Degree moments of the graph.
    Stats,
    /// The four paradox gaps, closed form and direct.
    Paradox,
    /// Fraction of nodes experiencing a paradox, by degree bin.
    Curve(CurveArgs),
    /// Global and local perception bias per attribute.
    Bias(BiasArgs),
    /// Attributes ordered by perception bias.
    Rank(RankArgs),
    /// Monte-Carlo evaluation of one polling method.
    Poll(PollArgs),
    /// Win fractions of friendship polling against the baselines.
    Compare(CompareArgs),
    /// Exact friendship-polling variance and its spectral bound.
    Spectral(SpectralArgs),
    /// Generate a synthetic graph with planted attributes.
    Synth(SynthArgs),
    /// Peel nodes without friends or followers until none remain.
    Core(CoreArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    FriendsMoreFollowers,
    FollowersMoreFriends,
    FriendsMoreFriends,
    FollowersMoreFollowers,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum, default_value_t = VariantArg::FriendsMoreFollowers)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    pub per_decade: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HistogramKind {
    Prevalence,
    GlobalBias,
    LocalBias,
    /// Per-node bias for one attribute (needs `--attr`).
    Individual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZeroFriends {
    Exclude,
    TreatAsZero,
}

#[derive(Debug, Args)]
pub struct BiasArgs {
    /// Restrict to one attribute.
    #[arg(long)]
    pub attr: Option<String>,
    #[arg(long, value_enum, default_value_t = ZeroFriends::Exclude)]
    pub zero_friends: ZeroFriends,
    /// Emit a histogram instead of per-attribute rows.
    #[arg(long, value_enum)]
    pub histogram: Option<HistogramKind>,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub bins: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KeyArg {
    Local,
    Global,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long, value_enum, default_value_t = KeyArg::Local)]
    pub key: KeyArg,
    #[arg(long, default_value_t = 20)]
    pub top: usize,
    #[arg(long, default_value_t = 10)]
    pub bottom: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ip,
    Npp,
    Fpp,
    FppUnbiased,
}

#[derive(Debug, Args)]
pub struct PollArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long)]
    pub budget: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long)]
    pub attr: String,
    /// Also report exact moments when the graph has at most this many nodes.
    #[arg(long, default_value_t = 10_000)]
    pub exact_threshold: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_delimiter = ',', default_value = "25")]
    pub budgets: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Also write every per-attribute evaluation as CSV.
    #[arg(long)]
    pub details: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectralArgs {
    #[arg(long, default_value_t = 1)]
    pub budget: usize,
    #[arg(long)]
    pub attr: Option<String>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawArg {
    Regular,
    Powerlaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CouplingArg {
    Independent,
    Identical,
    Correlated,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub nodes: usize,
    #[arg(long, value_enum, default_value_t = LawArg::Powerlaw)]
    pub law: LawArg,
    /// Degree of every node under the regular law.
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
    #[arg(long, default_value_t = 2.5)]
    pub exponent: f64,
    #[arg(long, default_value_t = 1)]
    pub min_degree: usize,
    #[arg(long, default_value_t = 100)]
    pub max_degree: usize,
    #[arg(long, value_enum, default_value_t = CouplingArg::Independent)]
    pub coupling: CouplingArg,
    /// Target in/out-degree correlation for `--coupling correlated`.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub degree_correlation: f64,
    #[arg(long, default_value_t = 0)]
    pub n_attrs: usize,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.01, 0.08])]
    pub prevalence_range: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 0.3], allow_negative_numbers = true)]
    pub rho_range: Vec<f64>,
    /// Reduce to the non-zero core before planting attributes.
    #[arg(long)]
    pub core: bool,
    #[arg(long)]
    pub edges_out: PathBuf,
    #[arg(long)]
    pub attrs_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoreArgs {
    #[arg(long)]
    pub edges_out: PathBuf,
}
