//! `housing`: command-line access to every operation in `housing-core`.
//!
//! Reports go to stdout as JSON (default) or CSV; see [`report`] for the
//! layout. Exit status is 0 on success, 1 on a domain error (bad input
//! file, size mismatch, bound exceeded without `--long-run`, ...) and 2 on a
//! usage error (unknown flag, malformed permutation, missing `--seed`).
//! Environment variables are never consulted.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use housing_core::experiments::RankConvention;
use housing_core::Permutation;
use serde::{Serialize, Serializer};
use thiserror::Error;

mod commands;
pub mod report;

pub use report::{Format, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] housing_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "housing", version, about = "Core allocations, priority/shuffle bijection, rank statistics")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    #[serde(skip)]
    pub workers: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Core allocation, or first-come first-served with --priority.
    Allocate(AllocateArgs),
    /// Core membership, local optimality and priority reconstruction.
    #[command(alias = "verify")]
    Check(CheckArgs),
    /// Reassign preference lists: trader sigma(k) receives list k.
    Shuffle(ShuffleArgs),
    /// Seeded uniformly random profile.
    Generate(GenerateArgs),
    /// Priority/shuffle correspondence.
    #[command(subcommand)]
    Bijection(BijectionCommand),
    /// Exact rank statistics.
    Stats(StatsArgs),
    /// Exhaustive rank distributions, core versus first-come first-served.
    Enumerate(EnumerateArgs),
    /// Seeded Monte-Carlo rank statistics.
    Simulate(SimulateArgs),
    /// Stable-marriage totals, scans and checkpointed runs.
    #[command(subcommand)]
    Marriage(MarriageCommand),
}

#[derive(Debug, Args, Serialize)]
pub struct AllocateArgs {
    /// Profile file.
    #[arg(long)]
    pub input: PathBuf,
    /// Allocate first-come first-served under this priority instead.
    #[arg(long, value_parser = parse_perm)]
    pub priority: Option<Permutation>,
    /// Order in which unallocated traders start a proposal path.
    #[arg(long, value_enum, default_value_t = EntryArg::Smallest, conflicts_with = "entry_order")]
    pub entry: EntryArg,
    /// Explicit entry order; overrides --entry.
    #[arg(long, value_parser = parse_perm)]
    pub entry_order: Option<Permutation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryArg {
    Smallest,
    Largest,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// The allocation to test: goods[k] is trader k's good.
    #[arg(long, value_parser = parse_perm)]
    pub goods: Permutation,
    /// Largest n for the brute-force coalition search.
    #[arg(long, default_value_t = housing_core::DEFAULT_BRUTE_FORCE_BOUND)]
    pub bound: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ShuffleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_perm)]
    pub sigma: Permutation,
    /// Also write the shuffled profile here in the text format.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Also write the profile here in the text format.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum BijectionCommand {
    /// Shuffling corresponding to priority --perm.
    PiToSigma(BijectionArgs),
    /// Priority corresponding to shuffling --perm.
    SigmaToPi(BijectionArgs),
    /// Whether --perm (a priority) and --sigma are consistent.
    Check(BijectionCheckArgs),
    /// Rows truncated at the goods allocated under priority --perm.
    Tableau(BijectionArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BijectionArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_perm)]
    pub perm: Permutation,
}

#[derive(Debug, Args, Serialize)]
pub struct BijectionCheckArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_perm)]
    pub perm: Permutation,
    #[arg(long, value_parser = parse_perm)]
    pub sigma: Permutation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// Mean of the rank sum.
    RankSum,
    /// Mean of the sum of squared ranks.
    SquareSum,
    /// Mean of the squared rank sum.
    SecondMoment,
    /// Variance of the rank sum.
    Variance,
    /// Variance of a single trader's rank.
    RankVariance,
    /// Mean of the sum of pairwise rank products.
    ProductCoeff,
    /// Coefficients of E prod (z + r_k).
    Poly,
    /// Coefficients of E prod (z + r_k^2).
    SquarePoly,
    /// P(max rank <= m); all m when --m is absent.
    MaxRankCdf,
    /// Truncated product prod_{k<=terms} (1 - 2^-k).
    MaxRankLimit,
    /// Unsigned Stirling number of the first kind [n, k].
    Stirling,
    /// Harmonic number of the given order.
    Harmonic,
    /// P(trader k's rank exceeds j).
    Q,
    /// sum_j C(j, m) q(n, k, j).
    WeightedQ,
    Binomial,
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    #[arg(value_enum)]
    pub quantity: Quantity,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    #[arg(long, default_value_t = 64)]
    pub terms: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    /// Priority for the first-come first-served side; identity by default.
    #[arg(long, value_parser = parse_perm, conflicts_with = "all_priorities")]
    pub priority: Option<Permutation>,
    /// Compare against every priority order.
    #[arg(long)]
    pub all_priorities: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMethodArg {
    Stable,
    Hash,
    MarriageFixedGirls,
    MarriageRandomGirls,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub samples: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SimMethodArg::Stable)]
    pub method: SimMethodArg,
    /// Priority for --method hash; identity by default.
    #[arg(long, value_parser = parse_perm)]
    pub priority: Option<Permutation>,
    /// Girls' lists for --method marriage-fixed-girls.
    #[arg(long)]
    pub girls: Option<GirlsSource>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum MarriageCommand {
    /// Exhaustive rank total over all boys' matrices.
    Total(MarriageTotalArgs),
    /// Totals for every isomorphism class of girls' matrices.
    Scan(ScanArgs),
    /// Checkpointed exhaustive total, resumable.
    Run(MarriageRunArgs),
    /// Canonical representative and class size of a girls' matrix.
    Canonical(GirlsArgs),
    /// Isomorphism classes of girls' matrices.
    Classes(ClassesArgs),
    /// Boy-optimal stable matching for one instance.
    Match(MatchArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GirlsArgs {
    /// `cyclic`, `equal`, or a profile file.
    #[arg(long)]
    pub girls: GirlsSource,
    /// Size for `cyclic` and `equal`.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct MarriageTotalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub girls: GirlsArgs,
    /// Convention of the headline `total` field; both are always reported.
    #[arg(long, value_enum, default_value_t = ConventionArg::ZeroBased)]
    pub convention: ConventionArg,
    /// Allow n = 5 and 6 (hours to years of work).
    #[arg(long)]
    pub long_run: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionArg {
    OneBased,
    ZeroBased,
}

impl From<ConventionArg> for RankConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::OneBased => RankConvention::OneBased,
            ConventionArg::ZeroBased => RankConvention::ZeroBased,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long)]
    pub n: usize,
    /// List only the first `top` classes.
    #[arg(long)]
    pub top: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct MarriageRunArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub girls: GirlsArgs,
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long, default_value_t = 1 << 24)]
    pub chunk_size: u64,
    /// Stop after this many chunks (the checkpoint stays resumable).
    #[arg(long)]
    pub max_chunks: Option<u64>,
    /// Allow n = 5 and 6.
    #[arg(long)]
    pub long_run: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassesArgs {
    #[arg(long)]
    pub n: usize,
    /// Cross-check class sizes by direct counting.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct MatchArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub girls: GirlsArgs,
    /// Boys' lists.
    #[arg(long, conflicts_with = "boys_index", required_unless_present = "boys_index")]
    pub boys: Option<PathBuf>,
    /// Boys' matrix by its index in the exhaustive enumeration.
    #[arg(long)]
    pub boys_index: Option<u64>,
}

/// Where the girls' lists come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GirlsSource {
    Cyclic,
    Equal,
    File(PathBuf),
}

impl FromStr for GirlsSource {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "cyclic" => GirlsSource::Cyclic,
            "equal" => GirlsSource::Equal,
            path => GirlsSource::File(path.into()),
        })
    }
}

impl fmt::Display for GirlsSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GirlsSource::Cyclic => f.write_str("cyclic"),
            GirlsSource::Equal => f.write_str("equal"),
            GirlsSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl Serialize for GirlsSource {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn parse_perm(s: &str) -> Result<Permutation, String> {
    Permutation::parse_list(s).map_err(|e| e.to_string())
}

/// Everything a run produced: exit status and the two output streams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse `args` (program name first) and execute.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Run a parsed command line and return the rendered report.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let workers = match cli.workers {
        Some(w) => w as usize,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let mut config = serde_json::to_value(cli)?;
    config["workers"] = workers.into();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let result = pool.install(|| commands::dispatch(&cli.command))?;
    report::render(&report::assemble(config, result), cli.format)
}

/// One library operation and a command line that reaches it.
///
/// Placeholders in `example`: `{intro}` and `{table}` name profile files,
/// `{checkpoint}` a fresh checkpoint path.
#[derive(Clone, Copy, Debug)]
pub struct Operation {
    pub name: &'static str,
    pub example: &'static [&'static str],
}

pub const REGISTRY: &[Operation] = &[
    Operation { name: "stable_allocation", example: &["allocate", "--input", "{intro}"] },
    Operation { name: "stable_allocation_with", example: &["allocate", "--input", "{intro}", "--entry-order", "3,1,2"] },
    Operation { name: "uniform_hash_allocation", example: &["allocate", "--input", "{intro}", "--priority", "2,1,3"] },
    Operation { name: "is_core_allocation", example: &["check", "--input", "{intro}", "--goods", "1,3,2"] },
    Operation { name: "is_locally_optimal", example: &["check", "--input", "{intro}", "--goods", "2,3,1"] },
    Operation { name: "priority_reconstruction", example: &["verify", "--input", "{intro}", "--goods", "2,3,1"] },
    Operation { name: "shuffle_profile", example: &["shuffle", "--input", "{intro}", "--sigma", "2,3,1"] },
    Operation { name: "random_profile", example: &["generate", "--n", "5", "--seed", "7"] },
    Operation { name: "pi_to_sigma", example: &["bijection", "pi-to-sigma", "--input", "{table}", "--perm", "5,3,4,9,1,8,2,7,6"] },
    Operation { name: "sigma_to_pi", example: &["bijection", "sigma-to-pi", "--input", "{table}", "--perm", "5,7,9,2,1,8,6,4,3"] },
    Operation { name: "is_consistent", example: &["bijection", "check", "--input", "{intro}", "--perm", "1,3,2", "--sigma", "2,1,3"] },
    Operation { name: "TruncatedTableau", example: &["bijection", "tableau", "--input", "{table}", "--perm", "5,3,4,9,1,8,2,7,6"] },
    Operation { name: "expected_rank_sum", example: &["stats", "rank-sum", "--n", "3"] },
    Operation { name: "expected_square_sum", example: &["stats", "square-sum", "--n", "3"] },
    Operation { name: "rank_sum_second_moment", example: &["stats", "second-moment", "--n", "3"] },
    Operation { name: "rank_sum_variance", example: &["stats", "variance", "--n", "3"] },
    Operation { name: "expected_rank_variance", example: &["stats", "rank-variance", "--n", "3"] },
    Operation { name: "rank_product_coeff", example: &["stats", "product-coeff", "--n", "3"] },
    Operation { name: "expected_rank_poly", example: &["stats", "poly", "--n", "3"] },
    Operation { name: "expected_square_poly", example: &["stats", "square-poly", "--n", "3"] },
    Operation { name: "max_rank_at_most", example: &["stats", "max-rank-cdf", "--n", "40", "--m", "20"] },
    Operation { name: "max_rank_half_limit", example: &["stats", "max-rank-limit", "--terms", "64"] },
    Operation { name: "stirling_cycle", example: &["stats", "stirling", "--n", "5", "--k", "2"] },
    Operation { name: "harmonic", example: &["stats", "harmonic", "--n", "10", "--order", "2"] },
    Operation { name: "q_exceed", example: &["stats", "q", "--n", "5", "--k", "3", "--j", "1"] },
    Operation { name: "weighted_q_sum", example: &["stats", "weighted-q", "--n", "5", "--k", "3", "--m", "1"] },
    Operation { name: "binomial", example: &["stats", "binomial", "--n", "6", "--k", "2"] },
    Operation { name: "exhaustive_rank_distribution", example: &["enumerate", "--n", "3", "--all-priorities"] },
    Operation { name: "monte_carlo_summary", example: &["simulate", "--n", "6", "--samples", "2000", "--seed", "1"] },
    Operation { name: "total_marriage_rank_sum", example: &["marriage", "total", "--girls", "cyclic", "--n", "3"] },
    Operation { name: "conjecture_scan", example: &["marriage", "scan", "--n", "3"] },
    Operation { name: "run_marriage_totals_checkpointed", example: &["marriage", "run", "--girls", "equal", "--n", "3", "--checkpoint", "{checkpoint}"] },
    Operation { name: "girls_canonical_form", example: &["marriage", "canonical", "--girls", "cyclic", "--n", "4"] },
    Operation { name: "girls_isomorphism_classes", example: &["marriage", "classes", "--n", "3", "--verify"] },
    Operation { name: "gale_shapley_male_optimal", example: &["marriage", "match", "--girls", "{intro}", "--boys", "{intro}"] },
    Operation { name: "boys_matrix_at", example: &["marriage", "match", "--girls", "cyclic", "--n", "3", "--boys-index", "100"] },
];
