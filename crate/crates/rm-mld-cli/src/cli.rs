//! Argument surface of the `rm-mld` binary.

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::Format;

#[derive(Parser, Debug)]
#[command(
    name = "rm-mld",
    version,
    about = "Two-step majority-logic coding tools for binary Reed-Muller codes"
)]
pub struct RmMld {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CodeArgs {
    /// Code order r (1 <= r <= m/2).
    #[arg(long)]
    pub r: u32,
    /// Log-length m (length is 2^m).
    #[arg(long)]
    pub m: u32,
    /// Position ordering of the points of Z_2^m.
    #[arg(long, value_enum, default_value_t = OrderingArg::Auto)]
    pub ordering: OrderingArg,
    /// Hex modulus for the power ordering (bit i = coefficient of x^i);
    /// defaults to a fixed primitive polynomial per degree.
    #[arg(long)]
    pub modulus: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderingArg {
    /// Power ordering for m = 5, lexicographic otherwise.
    Auto,
    Lex,
    Power,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Text,
    Records,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Records => Format::Records,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Systematically encode k information bits into a codeword.
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// Information positions: `canonical`, `type1`..`type7`,
        /// `@file`, or a literal `{j1,j2,...}`.
        #[arg(long, default_value = "canonical")]
        info_set: String,
        /// Input bits: literal 0/1 string, `@file`, or `-` for stdin.
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Decode a received word (all positions, information positions, or
    /// the punctured code).
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        /// Check-flat source: `full`, `witness:NAME`, `construct:KIND`
        /// (full, naive, shared, pruned, rm1), `search`, or `@file`.
        #[arg(long, default_value = "full")]
        family: String,
        /// Information positions (for family sources that need them).
        #[arg(long, default_value = "canonical")]
        info_set: String,
        /// Decode 2^m - 1 received symbols of the code punctured at the
        /// zero point's position.
        #[arg(long)]
        punctured: bool,
        #[arg(long, default_value = "-")]
        input: String,
        /// Seed for `--family search`.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Placement budget for `--family search`.
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Channel simulation: random error patterns of each weight against
    /// the all-positions and information-position decoders.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value = "full")]
        family: String,
        #[arg(long, default_value = "canonical")]
        info_set: String,
        /// Error-weight range `A..B` (inclusive).
        #[arg(long, default_value = "0..4")]
        weights: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Closed-form and integer-program bounds on the minimal family size.
    Bounds {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Recompute a reference table and diff it against the shipped
    /// fixture (1 bounds, 2 generator, 3 invariants, 4 census, 5 gates).
    Tables {
        /// Table id: 1..5, I..V, or bounds/generator/invariants/census/gates.
        which: String,
        /// Census only over the clique sizes needed by the exclusion
        /// search (12..15); the remaining cells are rendered unchecked.
        #[arg(long)]
        fast: bool,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Construct, search, load or validate an admissible family.
    Family {
        #[command(flatten)]
        code: CodeArgs,
        /// `witness:NAME`, `construct:KIND`, `search`, or `@file`.
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "canonical")]
        info_set: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
        /// Write the family file here.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Run the full verification battery (witnesses, program optima,
    /// exclusion searches, table reproduction).
    Verify {
        /// Also run the 29-flat exclusion search (budgeted).
        #[arg(long)]
        long: bool,
        /// Node budget for the long exclusion search.
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}
