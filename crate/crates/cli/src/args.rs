use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kappa_core::IntMultiSet;

#[derive(Debug, Parser)]
#[command(name = "kappa", version, about = "Exact kappa-class products on moduli of curves of compact type")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Coefficient cache file; KAPPA_CACHE overrides it.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Worker threads for sweeps (1 runs sequentially).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Print elapsed time and cache statistics to stderr.
    #[arg(long, global = true)]
    pub stats: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Recursive,
    Ck,
    Closed,
    Pairing,
}

impl MethodArg {
    pub fn name(self) -> &'static str {
        match self {
            MethodArg::Recursive => "recursive",
            MethodArg::Ck => "ck",
            MethodArg::Closed => "closed",
            MethodArg::Pairing => "pairing",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProductMethod {
    Recursive,
    Ck,
    Closed,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand κ_A in the basis of M^ct_{g,n}.
    Product {
        #[arg(long, value_parser = parse_multiset)]
        a: IntMultiSet,
        #[arg(long, default_value_t = 0)]
        genus: u32,
        #[arg(long)]
        marked: u32,
        #[arg(long, value_enum, default_value_t = ProductMethod::Closed)]
        method: ProductMethod,
    },
    /// One coefficient x_p, cross-checked against the other methods.
    Xcoeff {
        #[arg(long, value_parser = parse_multiset)]
        a: IntMultiSet,
        /// Nested lists over positions of the sorted multiset, e.g. [[0,1]].
        #[arg(long)]
        partition: String,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
        method: MethodArg,
    },
    /// Pair κ_B with a boundary stratum given by its dimension sequence.
    Pair {
        #[arg(long, value_parser = parse_multiset)]
        b: IntMultiSet,
        /// Component dimensions, e.g. 0,2.
        #[arg(long, value_parser = parse_dims)]
        dims: IntMultiSet,
    },
    /// Recover the basis coefficients of κ_A on M̄_{0,n} from pairings.
    Solve {
        #[arg(long, value_parser = parse_multiset)]
        a: IntMultiSet,
        #[arg(long)]
        marked: u32,
    },
    /// Compare closed-form truncation variants with the recursive method.
    Reconcile {
        #[command(flatten)]
        bounds: SweepArgs,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(kappa_core::verify::Suite::NAMES))]
        suite: String,
        #[command(flatten)]
        bounds: SweepArgs,
        /// Seed for the randomized Faber round trip.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check one identity; params are a JSON object.
    Identity {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(kappa_core::identities::IDENTITIES))]
        name: String,
        #[arg(long)]
        params: String,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub max_sum: Option<u32>,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long)]
    pub max_entry: Option<u32>,
    #[arg(long)]
    pub max_d: Option<usize>,
}

fn parse_multiset(s: &str) -> Result<IntMultiSet, String> {
    let a = IntMultiSet::parse(s)?;
    if a.is_empty() || !a.all_positive() {
        return Err("expected a nonempty list of integers >= 1".into());
    }
    Ok(a)
}

fn parse_dims(s: &str) -> Result<IntMultiSet, String> {
    let d = IntMultiSet::parse(s)?;
    if d.is_empty() {
        return Err("expected a nonempty list of integers >= 0".into());
    }
    Ok(d)
}
