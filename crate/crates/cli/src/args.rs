use std::path::PathBuf;

use bqap::heuristics::DEFAULT_MAX_ITERS;
use bqap::{Variant, DEFAULT_LIMIT};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bqap", version, about = "Bipartite quadratic assignment toolkit")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for enumeration (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Evaluate a solution.
    Eval {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Print the exact average objective value.
    Avg {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Run a heuristic.
    Solve(SolveArgs),
    /// Enumerate the whole feasible set.
    Exact {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        limit: LimitArg,
        /// Also count the solutions this solution dominates.
        #[arg(long)]
        dominates: Option<PathBuf>,
    },
    /// Find a solution dominating the optimized-swap neighborhood and every
    /// at-or-above-average solution.
    Dominate {
        #[arg(long)]
        instance: PathBuf,
        /// Count dominated solutions by enumeration.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        limit: LimitArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check instance-level properties against enumeration.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        limit: LimitArg,
        /// Seed for the random fractional points of the rounding check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct LimitArg {
    /// Largest feasible set to enumerate.
    #[arg(long = "limit", env = "BQAP_LIMIT", default_value_t = DEFAULT_LIMIT)]
    pub value: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Random,
    Tightness,
    Adversarial,
    Partition,
    Embed,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// 1 or 2.
    #[arg(long, value_parser = parse_variant, default_value = "1")]
    pub variant: Variant,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = -9, allow_negative_numbers = true)]
    pub lo: i64,
    #[arg(long, default_value_t = 9, allow_negative_numbers = true)]
    pub hi: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Large penalty (adversarial, embed).
    #[arg(long = "L")]
    pub big_l: Option<i64>,
    #[arg(long, default_value_t = 1)]
    pub eps: i64,
    #[arg(long)]
    pub a: Option<usize>,
    #[arg(long)]
    pub b: Option<usize>,
    /// Comma-separated positive integers (partition).
    #[arg(long, value_delimiter = ',')]
    pub elements: Vec<i64>,
    /// Position `i,j,k,l` of the unit entry (tightness).
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub at: Vec<usize>,
    /// Source instance (embed).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Canonical,
    Rxoy,
    Ryox,
    Alternate,
    LsSwap,
    LsCswap,
    LsOswap,
    Dominate,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Start solution for alternate and local search (default: random from --seed).
    #[arg(long)]
    pub start: Option<PathBuf>,
    /// Seed for the random start, or for a random fractional point with rxoy/ryox.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trace: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    match s.to_ascii_lowercase().as_str() {
        "1" | "bqap1" => Ok(Variant::Bqap1),
        "2" | "bqap2" => Ok(Variant::Bqap2),
        _ => Err(format!("expected 1 or 2, got `{s}`")),
    }
}
