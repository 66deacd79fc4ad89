use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "braidfan", version, about = "Exact set-function toolkit for braid-fan CPWL functions and conforming maxout networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit JSON instead of text where a verb supports both.
    #[arg(long, global = true)]
    pub json: bool,

    /// Add non-authoritative decimal renderings to JSON output.
    #[arg(long, global = true)]
    pub approx: bool,

    /// Cap the number of worker threads (output does not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Allow ground sets beyond 20 elements (memory grows as 2^d).
    #[arg(long, global = true)]
    pub allow_large: bool,
}

#[derive(Debug, Args, Clone)]
pub struct Io {
    /// Input file ("-" for stdin); repeat for tuples.
    #[arg(short = 'i', long = "input")]
    pub input: Vec<PathBuf>,

    /// Output file (default stdout).
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct Target {
    /// Generator shorthand instead of an input file, e.g. sigma:[1..5] or sigma:[1,3,4].
    #[arg(long)]
    pub target: Option<String>,

    /// Ground set size for --target (default: largest label in M).
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Set function of a CPWL expression: F(S) = f(1_S).
    Phi {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        target: Target,
    },
    /// Expression c + Σ λ_M σ_M of a set function on [∅, [d]].
    PhiInv {
        #[command(flatten)]
        io: Io,
    },
    /// Evaluate a set function (or an expression) at a rational point.
    Eval {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        target: Target,
        /// Comma-separated coordinates, e.g. "1,-2/3,0".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Smallest k with F ∈ Sf(k), with a witness interval.
    Level {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        target: Target,
    },
    /// Membership predicates: sign consistency (hc) or conformity of a tuple.
    Check {
        what: CheckKind,
        #[command(flatten)]
        io: Io,
    },
    /// Entrywise maximum of a tuple.
    Max {
        #[command(flatten)]
        io: Io,
        /// Refuse non-conforming tuples.
        #[arg(long)]
        require_conforming: bool,
    },
    /// Restrict a set function to a sub-interval.
    Restrict {
        #[command(flatten)]
        io: Io,
        /// Lower end X, comma-separated labels (empty for ∅).
        #[arg(long, default_value = "")]
        lower: String,
        /// Upper end Y, comma-separated labels.
        #[arg(long)]
        upper: String,
    },
    /// Plan of a conforming maxout network computing max_{i ∈ M} x_i.
    BuildMaxNet {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        d: usize,
        /// Index set M, e.g. 1,2,3.
        #[arg(long = "M")]
        m: String,
        /// Layer ranks, e.g. 3,2.
        #[arg(long)]
        ranks: String,
    },
    /// Exact forward pass of a network plan.
    RunNet {
        #[command(flatten)]
        io: Io,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Also compose the plan symbolically and compare.
        #[arg(long)]
        check: bool,
    },
    /// Certify that a target is not computable with ℓ hidden conforming layers.
    Certify {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        target: Target,
        /// Number of hidden layers ℓ.
        #[arg(long = "l")]
        layers: usize,
        #[arg(long, value_enum, default_value_t = RuleArg::Exact4)]
        rule: RuleArg,
    },
    /// Depth bound k(ℓ) under a rule.
    Bound {
        #[arg(long = "l")]
        layers: usize,
        #[arg(long, value_enum, default_value_t = RuleArg::Exact4)]
        rule: RuleArg,
    },
    /// Move an expression between the braid fan and its pinned variant.
    ChangeFan {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum)]
        direction: Direction,
        /// Coefficient of σ_{d} after embedding.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        slope: String,
    },
    /// Run one of the verification suites.
    Verify {
        check: VerifyKind,
        #[command(flatten)]
        io: Io,
        /// Ground set size (base: 4, quadratic: 7, dims: 4, fan: 3).
        #[arg(long)]
        d: Option<usize>,
        /// Level k (base: 2, quadratic: 2); largest level for dims (default d).
        #[arg(long)]
        k: Option<usize>,
        /// Tuple size for the fan laws (default 2).
        #[arg(long)]
        r: Option<usize>,
        /// Accepted samples to draw (quadratic: 200, rank5: 300, fan: 200).
        #[arg(long)]
        samples: Option<usize>,
        /// RNG seed (quadratic: 1, rank5: 7, fan: 3).
        #[arg(long)]
        seed: Option<u64>,
        /// Run the built-in broken instance instead (must FAIL).
        #[arg(long)]
        mutate: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CheckKind {
    Hc,
    Conforming,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VerifyKind {
    Prop51,
    Base,
    Quadratic,
    Rank5,
    Dims,
    Fan,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Closed,
    Recursive,
    Exact4,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Direction {
    Project,
    Embed,
}
