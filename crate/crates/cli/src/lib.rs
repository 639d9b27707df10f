//! Command-line front end. Every subcommand reads and validates its inputs,
//! calls into `groupeq`, and renders the result; exit codes are
//! 0 success, 1 negative verdict, 2 usage or parse error, 3 budget exceeded.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "groupeq", version, about = "Equations over groups: classify, solve, decide closedness, build witnesses")]
pub struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Worker threads for exhaustive search (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Tsv,
    Report,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exponent-sum classification of a system file.
    Classify {
        system: PathBuf,
        /// Number of equations to take from a rule-generated system.
        #[arg(short = 'n', long, default_value_t = 8)]
        truncation: usize,
    },
    /// Solve a finite system over a group file.
    Solve {
        system: PathBuf,
        group: PathBuf,
        /// Truncation for rule-generated systems.
        #[arg(short = 'n', long)]
        truncation: Option<usize>,
        /// Largest number of candidate assignments to enumerate.
        #[arg(long, default_value_t = groupeq::pcgroup::DEFAULT_BUDGET)]
        budget: u64,
        /// Most solutions to print.
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
    /// Solution-closedness verdict for a group descriptor.
    Criterion {
        descriptor: PathBuf,
        #[arg(long, value_enum)]
        theorem: Theorem,
    },
    /// Build and check a witness family.
    Witness {
        #[command(subcommand)]
        family: Family,
    },
    /// Digit-series solution in the p-adic integers, with periodicity and
    /// rational-reconstruction verdicts.
    Padic(PadicArgs),
    /// Order, nilpotency class and central series of a group file.
    Groupinfo { group: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    /// Periodic groups: bounded first Ulm factors, trivial at almost every prime.
    Ulm,
    /// Abelian groups: reduced part of bounded period.
    Reduced,
    /// Torsion-free groups: divisibility.
    TorsionFree,
}

#[derive(Subcommand, Debug)]
pub enum Family {
    /// Bidiagonal family `x_i x_{i+1}^{-p^{k_i - k_{i-1}}} = a_i`.
    Ulmbad {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u64,
        /// Explicit k_1, k_2, ... instead of k_1 = m + 1, k_i = 2 k_{i-1} + 1.
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<u64>>,
        /// Truncations 1..=n are checked.
        #[arg(short = 'n', long, default_value_t = 4)]
        n: usize,
    },
    /// Cross-prime family `x y_i^{-p_i^{m}} = a_i`.
    Crossprime {
        #[arg(long, default_value_t = 1)]
        m: u64,
        /// Explicit primes; default the first `n`.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[arg(short = 'n', long, default_value_t = 8)]
        n: usize,
    },
}

#[derive(Args, Debug)]
pub struct PadicArgs {
    #[arg(long)]
    pub p: u64,
    /// Number of digits N.
    #[arg(long, default_value_t = 64)]
    pub precision: usize,
    /// `triangular`, `constant:<d>`, `periodic:<d1,d2,..>` or `digits:<d1,d2,..>`.
    #[arg(long)]
    pub rule: String,
    /// Largest period L tested.
    #[arg(long, default_value_t = groupeq::padic::DEFAULT_MAX_PERIOD)]
    pub max_period: usize,
    #[arg(long, default_value_t = groupeq::padic::DEFAULT_MIN_REPEATS)]
    pub min_repeats: usize,
    /// Reconstruction bound B; default `p^floor(7N/16)`.
    #[arg(long)]
    pub bound: Option<String>,
}

/// Rendered result of one command.
pub struct Outcome {
    pub code: i32,
    pub human: String,
    pub report: groupeq::report::Report,
    /// Table for `--format tsv`; the report as `key<TAB>value` otherwise.
    pub tsv: Option<String>,
}

/// Failure before a verdict, with the exit code to use.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl ToString) -> Self {
        Failure { code: EXIT_USAGE, message: message.to_string() }
    }

    pub fn budget(message: impl ToString) -> Self {
        Failure { code: EXIT_BUDGET, message: message.to_string() }
    }
}

fn render(out: &Outcome, format: Format) -> String {
    match format {
        Format::Human => out.human.clone(),
        Format::Report => out.report.to_string(),
        Format::Tsv => out.tsv.clone().unwrap_or_else(|| {
            out.report.entries().iter().map(|(k, v)| format!("{k}\t{v}\n")).collect()
        }),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            let _ = writeln!(stderr, "error: --jobs must be at least 1");
            return EXIT_USAGE;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match commands::dispatch(&cli.command) {
        Ok(out) => {
            let _ = stdout.write_all(render(&out, cli.format).as_bytes());
            out.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
